#include "bfb/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bfb/error.hpp"
#include "bfb/random.hpp"

namespace bfb {

namespace {

double rel_slack(double lhs, double rhs) {
  const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
  return (lhs - rhs) / scale;
}

FieldVector random_field(int n, std::mt19937_64& gen) {
  FieldVector v(n);
  for (double& x : v) {
    x = uniform(gen, -1.0, 1.0);
  }
  return v;
}

/// Largest Rayleigh quotient x^A x / x^B x of a symmetric pencil by power
/// iteration on B^{-1} A, with B applied matrix-free (B may carry a rank-one
/// term). Returns {value, iterations}; throws on stagnation.
struct PencilResult {
  double value = 0.0;
  int iterations = 0;
};

PencilResult max_rayleigh(const LinearOperator& a_op, const LinearOperator& b_op,
                          std::mt19937_64& gen, int max_outer = 2000,
                          double tol = 1e-13) {
  const int n = a_op.n;
  FieldVector x = random_field(n, gen);

  auto dot = [n](const FieldVector& u, const FieldVector& v) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += u[i] * v[i];
    return s;
  };

  FieldVector ax(n), bx(n);
  double mu_prev = 0.0;
  double last_delta = std::numeric_limits<double>::infinity();
  int stable = 0;
  for (int it = 1; it <= max_outer; ++it) {
    a_op.apply(x, ax);
    b_op.apply(x, bx);
    const double mu = dot(x, ax) / dot(x, bx);

    last_delta = std::abs(mu - mu_prev);
    if (it > 1 && last_delta <= tol * std::abs(mu)) {
      if (++stable >= 3) {
        return {mu, it};
      }
    } else {
      stable = 0;
    }
    mu_prev = mu;

    // x <- B^{-1} A x, normalized
    CgResult solve = solve_operator(b_op, ax, 1e-12, 20 * n);
    double norm = std::sqrt(dot(solve.x, solve.x));
    if (!(norm > 0.0)) {
      throw Error("eigen iteration: zero iterate");
    }
    for (int i = 0; i < n; ++i) x[i] = solve.x[i] / norm;
  }
  if (last_delta <= 1e-9 * std::abs(mu_prev)) {
    return {mu_prev, max_outer};
  }
  throw Error("eigen iteration: stagnation, quotient still moving at the cap");
}

} // namespace

PfEstimate estimate_pf_constant(const Mesh& mesh, int cert_samples,
                                unsigned long long seed) {
  const Forms forms = Forms::assemble(mesh);
  const int n = mesh.node_count();
  const FieldVector& b = forms.sigma_weights;
  double m_sigma = 0.0;
  for (double w : b) m_sigma += w;
  if (!(m_sigma > 0.0)) {
    throw Error("estimate_pf_constant: mesh has no Sigma boundary");
  }

  // A = K + M (full H1 norm), B = b b^T + K.
  LinearOperator a_op{n,
                      [&forms](const FieldVector& x, FieldVector& y) {
                        forms.stiffness.multiply(x, y);
                        FieldVector t;
                        forms.volume_mass.multiply(x, t);
                        for (std::size_t i = 0; i < y.size(); ++i) y[i] += t[i];
                      },
                      {}};
  LinearOperator b_op{n,
                      [&forms, &b](const FieldVector& x, FieldVector& y) {
                        forms.stiffness.multiply(x, y);
                        double bx = 0.0;
                        for (std::size_t i = 0; i < x.size(); ++i) bx += b[i] * x[i];
                        for (std::size_t i = 0; i < y.size(); ++i) y[i] += b[i] * bx;
                      },
                      {}};
  {
    FieldVector ka = forms.stiffness.diagonal();
    FieldVector ma = forms.volume_mass.diagonal();
    a_op.diag.resize(n);
    b_op.diag.resize(n);
    for (int i = 0; i < n; ++i) {
      a_op.diag[i] = ka[i] + ma[i];
      b_op.diag[i] = ka[i] + b[i] * b[i];
    }
  }

  std::mt19937_64 gen(seed);
  const PencilResult top = max_rayleigh(a_op, b_op, gen);

  PfEstimate est;
  est.mu_max = top.value;
  est.c_pf = std::sqrt(top.value);
  est.n_r = mesh.n_r;
  est.n_theta = mesh.n_theta;
  est.iterations = top.iterations;
  est.cert_samples = cert_samples;

  // Certification: the inequality must hold for random fields, and any
  // sample ratio above the eigen estimate (under-converged iteration)
  // raises the reported constant.
  double worst = std::numeric_limits<double>::infinity();
  for (int s = 0; s < cert_samples; ++s) {
    const FieldVector v = random_field(n, gen);
    const double lhs = h1_norm(forms, v);
    double bv = 0.0;
    for (int i = 0; i < n; ++i) bv += b[i] * v[i];
    const double rhs_base = std::abs(bv) + h1_seminorm(forms, v);
    est.c_pf = std::max(est.c_pf, lhs / rhs_base);
    worst = std::min(worst, (est.c_pf * rhs_base - lhs) / std::max(lhs, 1e-300));
  }
  est.worst_cert_slack = worst;
  return est;
}

TraceEstimate estimate_trace_constant(const Mesh& mesh, int cert_samples,
                                      unsigned long long seed) {
  const Forms forms = Forms::assemble(mesh);
  const int n = mesh.node_count();

  LinearOperator m_op{n,
                      [&forms](const FieldVector& x, FieldVector& y) {
                        forms.sigma_mass.multiply(x, y);
                      },
                      {}};
  LinearOperator h_op{n,
                      [&forms](const FieldVector& x, FieldVector& y) {
                        forms.stiffness.multiply(x, y);
                        FieldVector t;
                        forms.volume_mass.multiply(x, t);
                        for (std::size_t i = 0; i < y.size(); ++i) y[i] += t[i];
                      },
                      {}};
  {
    FieldVector ka = forms.stiffness.diagonal();
    FieldVector ma = forms.volume_mass.diagonal();
    h_op.diag.resize(n);
    for (int i = 0; i < n; ++i) h_op.diag[i] = ka[i] + ma[i];
  }

  std::mt19937_64 gen(seed);
  const PencilResult top = max_rayleigh(m_op, h_op, gen);

  TraceEstimate est;
  est.nu_max = top.value;
  est.c_tr = std::sqrt(top.value);
  est.iterations = top.iterations;
  est.cert_samples = cert_samples;

  double worst = std::numeric_limits<double>::infinity();
  for (int s = 0; s < cert_samples; ++s) {
    const FieldVector v = random_field(n, gen);
    const double lhs = std::sqrt(std::max(0.0, forms.sigma_mass.quadratic_form(v)));
    const double rhs_base = h1_norm(forms, v);
    est.c_tr = std::max(est.c_tr, lhs / rhs_base);
    worst = std::min(worst, (est.c_tr * rhs_base - lhs) / std::max(lhs, 1e-300));
  }
  est.worst_cert_slack = worst;
  return est;
}

namespace {

SubstitutionTerms substitution_terms(const Mesh& mesh, const Forms& forms, const PhysicsParams& p,
                           double holdall_area, double m_sigma) {
  const StateSolution sol = solve_robin(mesh, forms, p, 1e-12);
  const double g = p.boundary_flux();
  const int n = mesh.node_count();

  SubstitutionTerms t;
  t.flux_sign = p.flux_sign;
  t.datum = g;
  t.solve = sol.solve;
  t.dirichlet_energy = forms.stiffness.quadratic_form(sol.u);
  t.lifting_volume_term = forms.stiffness.bilinear_form(FieldVector(n, 1.0), sol.u);
  t.boundary_energy = p.beta * forms.sigma_mass.quadratic_form(sol.u);
  const FieldVector load = assemble_boundary_load(mesh, g);
  double linear = 0.0;
  for (int i = 0; i < n; ++i) linear += load[i] * sol.u[i];
  t.datum_linear_term = linear;

  // The identity substitutes phi = u_R, which is not admissible (u_R = 1 on
  // Gamma); the left-over is the Gamma flux term.
  t.identity_residual =
      t.dirichlet_energy + t.lifting_volume_term + t.boundary_energy - t.datum_linear_term;

  // Independent route: discrete reaction flux, the unconstrained residual
  // summed over the Gamma rows.
  FieldVector residual = forms.stiffness.multiply(sol.u);
  FieldVector ms_u = forms.sigma_mass.multiply(sol.u);
  for (int i = 0; i < n; ++i) {
    residual[i] += p.beta * ms_u[i] - load[i];
  }
  double reaction = 0.0;
  for (int i : mesh.boundary_nodes(BoundaryTag::Gamma)) {
    reaction += residual[i];
  }
  t.gamma_flux_reaction = reaction;

  t.boundary_l2 = std::sqrt(std::max(0.0, forms.sigma_mass.quadratic_form(sol.u)));
  const double lam_u = p.lambda * std::sqrt(holdall_area);
  t.boxed_bound = std::max(p.beta, lam_u) * t.boundary_l2;
  t.quadratic_plus_linear = t.boundary_energy + lam_u * t.boundary_l2;
  t.quadratic_plus_linear_msigma = t.boundary_energy + p.lambda * std::sqrt(m_sigma) * t.boundary_l2;
  return t;
}

} // namespace

SubstitutionAudit audit_substituted_identity(const Mesh& mesh, const PhysicsParams& p,
                                 double holdall_area) {
  const Forms forms = Forms::assemble(mesh);
  double m_sigma = 0.0;
  for (double w : forms.sigma_weights) m_sigma += w;

  PhysicsParams plus = p;
  plus.flux_sign = 1;
  PhysicsParams minus = p;
  minus.flux_sign = -1;

  SubstitutionAudit audit;
  audit.positive_flux = substitution_terms(mesh, forms, plus, holdall_area, m_sigma);
  audit.negative_flux = substitution_terms(mesh, forms, minus, holdall_area, m_sigma);
  audit.m_sigma = m_sigma;
  audit.holdall_area = holdall_area;
  return audit;
}

FlawedBoundWitness flawed_bound_probe(const Mesh& mesh, const StateSolution& robin,
                                      double holdall_area, double s_max,
                                      int grid_points) {
  const SparseSpd sigma_mass = assemble_boundary_mass(mesh, BoundaryTag::Sigma);
  const double trace_norm = std::sqrt(std::max(0.0, sigma_mass.quadratic_form(robin.u)));
  const double beta = robin.params.beta;
  const double lam_u = robin.params.lambda * std::sqrt(holdall_area);
  const double coeff = std::max(beta, lam_u);

  FlawedBoundWitness witness;
  if (!(trace_norm > 0.0)) {
    witness.degenerate = true;
    return witness;
  }
  witness.sufficient_scale = coeff / (beta * trace_norm);

  for (int k = 0; k < grid_points; ++k) {
    const double s =
        grid_points == 1 ? 1.0 : std::pow(s_max, static_cast<double>(k) / (grid_points - 1));
    const double scaled = s * trace_norm;
    const double lhs = beta * scaled * scaled + lam_u * scaled; // true quadratic + linear sum
    const double rhs = coeff * scaled;                          // boxed linear claim
    if (lhs > rhs) {
      witness.found = true;
      witness.s = s;
      witness.lhs = lhs;
      witness.rhs = rhs;
      return witness;
    }
  }
  return witness;
}

AuditReport audit_consistent_chain(const Mesh& mesh, const PhysicsParams& p,
                                   double holdall_area, const PfEstimate& pf,
                                   const TraceEstimate& tr) {
  const Forms forms = Forms::assemble(mesh);
  const StateSolution sol = solve_robin(mesh, forms, p, 1e-12);
  const double g = p.boundary_flux();
  const int n = mesh.node_count();

  AuditReport rep;
  rep.solve = sol.solve;
  rep.c_pf = pf.c_pf;
  rep.c_tr = tr.c_tr;
  rep.holdall_area = holdall_area;
  rep.omega_area = mesh.total_area();
  for (double w : forms.sigma_weights) rep.m_sigma += w;

  rep.dirichlet_energy = forms.stiffness.quadratic_form(sol.w);
  rep.boundary_energy = p.beta * forms.sigma_mass.quadratic_form(sol.w);
  double sigma_int = 0.0;
  for (int i = 0; i < n; ++i) sigma_int += forms.sigma_weights[i] * sol.w[i];
  rep.sigma_integral = sigma_int;
  rep.rhs_linear = (g - p.beta) * sigma_int;
  rep.lifting_volume_term =
      forms.stiffness.bilinear_form(FieldVector(n, 1.0), sol.w);

  const double energy_lhs = rep.dirichlet_energy + rep.boundary_energy;
  const double rhs_actual = rep.rhs_linear - rep.lifting_volume_term;
  rep.identity_residual_rel =
      std::abs(energy_lhs - rhs_actual) / std::max({std::abs(energy_lhs), 1.0});

  rep.w_h1 = h1_norm(forms, sol.w);
  rep.w_sigma_l2 = std::sqrt(std::max(0.0, forms.sigma_mass.quadratic_form(sol.w)));
  rep.u_h1 = h1_norm(forms, sol.u);
  rep.u_sigma_l2 = std::sqrt(std::max(0.0, forms.sigma_mass.quadratic_form(sol.u)));

  rep.c1 = std::min(1.0, p.beta / rep.m_sigma);
  rep.c2 = rep.c1 / (2.0 * pf.c_pf * pf.c_pf);
  rep.c2_printed = 0.5 * rep.c1;
  const double q = (p.lambda + p.beta) * std::sqrt(rep.m_sigma);
  rep.c3 = std::sqrt(holdall_area + q * q * tr.c_tr * tr.c_tr);
  rep.c3_printed = std::sqrt(holdall_area + p.lambda * p.lambda * holdall_area);
  rep.bound_w = rep.c3 / rep.c2;
  rep.bound_u = rep.bound_w + std::sqrt(rep.omega_area); // ||1||_H1(Omega) = sqrt(|Omega|)

  const double semi_w = std::sqrt(rep.dirichlet_energy);
  const double abs_int = std::abs(sigma_int);

  auto push = [&rep](std::string name, double lhs, double rhs, double constant,
                     bool required) {
    rep.links.push_back({std::move(name), lhs, rhs, rel_slack(lhs, rhs), constant, required});
  };

  // lhs >= rhs for each link.
  const double rhs_coeff = std::abs(g - p.beta) * std::sqrt(rep.m_sigma);
  push("energy_lower_bound", energy_lhs,
       rep.c1 * (rep.dirichlet_energy + sigma_int * sigma_int), rep.c1, true);
  push("quadratic_mean", rep.dirichlet_energy + sigma_int * sigma_int,
       0.5 * (semi_w + abs_int) * (semi_w + abs_int), 0.5, true);
  push("poincare_friedrichs", pf.c_pf * (abs_int + semi_w), rep.w_h1, pf.c_pf, true);
  push("coercivity", energy_lhs, rep.c2 * rep.w_h1 * rep.w_h1, rep.c2, true);
  push("rhs_cauchy_sigma", rhs_coeff * rep.w_sigma_l2, std::abs(rhs_actual), rhs_coeff,
       true);
  push("trace_bound", rep.c3 * rep.w_h1, rhs_coeff * rep.w_sigma_l2, rep.c3, true);
  push("final_bound_w", rep.bound_w, rep.w_h1, rep.bound_w, true);
  push("final_bound_u", rep.bound_u, rep.u_h1, rep.bound_u, true);
  // Printed-constant variants, reported only: the missing C_pf^{-2} factor
  // means the printed coercivity can fail.
  push("coercivity_printed", energy_lhs, rep.c2_printed * rep.w_h1 * rep.w_h1,
       rep.c2_printed, false);
  push("trace_bound_printed", rep.c3_printed * rep.w_h1, rhs_coeff * rep.w_sigma_l2,
       rep.c3_printed, false);

  rep.min_required_slack = std::numeric_limits<double>::infinity();
  for (const ChainLink& link : rep.links) {
    if (link.required) {
      rep.min_required_slack = std::min(rep.min_required_slack, link.slack_rel);
    }
  }
  rep.all_required_hold = rep.min_required_slack >= kChainSlackTol &&
                          rep.identity_residual_rel <= 1e-9;
  return rep;
}

SurveyResult uniform_bound_survey(const std::vector<DomainSpec>& family,
                                  const PhysicsParams& p, MeshResolution resolution,
                                  int cert_samples) {
  SurveyResult result;
  result.uniform_bound_holds = true;
  for (std::size_t d = 0; d < family.size(); ++d) {
    const Mesh mesh = generate_mesh(family[d], resolution.n_r, resolution.n_theta);
    const PfEstimate pf = estimate_pf_constant(mesh, cert_samples);
    const TraceEstimate tr = estimate_trace_constant(mesh, cert_samples);
    const AuditReport rep =
        audit_consistent_chain(mesh, p, family[d].holdall_area(), pf, tr);

    SurveyRow row;
    row.index = static_cast<int>(d);
    row.mean_radius = family[d].fourier[0].cos_k;
    row.u_h1 = rep.u_h1;
    row.chain_c = rep.bound_u;
    row.min_slack = rep.min_required_slack;
    row.bounded = rep.all_required_hold && rep.u_h1 <= rep.bound_u;
    result.rows.push_back(row);

    result.max_norm = std::max(result.max_norm, rep.u_h1);
    result.max_c = std::max(result.max_c, rep.bound_u);
    result.uniform_bound_holds = result.uniform_bound_holds && row.bounded;
  }
  result.uniform_bound_holds =
      result.uniform_bound_holds && result.max_norm <= result.max_c;
  return result;
}

} // namespace bfb
