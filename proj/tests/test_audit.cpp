#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bfb/audit.hpp"
#include "bfb/error.hpp"

using namespace bfb;

namespace {
constexpr double kPi = std::numbers::pi;

DomainSpec baseline_spec() { return build_domain(1.0, {{2.0, 0.0}}, 5.0); }

Mesh baseline_mesh(int n_r = 8, int n_theta = 64) {
  return generate_mesh(baseline_spec(), n_r, n_theta);
}
} // namespace

TEST_CASE("PF constant: lower bound, certification, scale invariance") {
  const Mesh mesh = baseline_mesh();
  const PfEstimate est = estimate_pf_constant(mesh, 1000);

  // constant fields certify C_pf >= sqrt(|Omega|)/m(Sigma); on the polygonal
  // mesh both area and length are the polygon values
  const SparseSpd sigma_mass = assemble_boundary_mass(mesh, BoundaryTag::Sigma);
  const double m_sigma = sigma_mass.quadratic_form(FieldVector(mesh.node_count(), 1.0));
  const double discrete_bound = std::sqrt(mesh.total_area()) / m_sigma;
  CHECK(est.c_pf >= discrete_bound * (1.0 - 1e-12));

  // continuum value for reference: sqrt(3 pi) / (4 pi)
  CHECK(est.c_pf >= 0.24430125595145996 * 0.999);

  CHECK(est.cert_samples == 1000);
  CHECK(est.worst_cert_slack >= -1e-9);
  CHECK(est.mu_max > 1.0); // oscillatory fields push the quotient above 1

  // homogeneity: the certified ratio is identical for v and 10 v
  const Forms forms = Forms::assemble(mesh);
  FieldVector v(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) {
    v[i] = std::sin(0.37 * i) + 0.2;
  }
  FieldVector v10 = v;
  for (double& x : v10) x *= 10.0;
  auto ratio = [&](const FieldVector& field) {
    double integral = 0.0;
    for (int i = 0; i < mesh.node_count(); ++i) integral += forms.sigma_weights[i] * field[i];
    return h1_norm(forms, field) / (std::abs(integral) + h1_seminorm(forms, field));
  };
  CHECK(ratio(v) == doctest::Approx(ratio(v10)).epsilon(1e-14));
}

TEST_CASE("PF constant is stable under refinement") {
  const double coarse = estimate_pf_constant(baseline_mesh(8, 48), 100).c_pf;
  const double fine = estimate_pf_constant(baseline_mesh(16, 96), 100).c_pf;
  CHECK(std::abs(fine - coarse) / fine < 0.05);
}

TEST_CASE("trace constant: definition, positivity, stability") {
  const Mesh mesh = baseline_mesh();
  const TraceEstimate est = estimate_trace_constant(mesh, 1000);
  CHECK(est.c_tr > 0.0);
  CHECK(std::isfinite(est.c_tr));
  CHECK(est.worst_cert_slack >= -1e-9);

  // constant field gives the lower bound sqrt(m(Sigma)/||1||_H1^2)
  const double m_sigma = assemble_boundary_mass(mesh, BoundaryTag::Sigma)
                             .quadratic_form(FieldVector(mesh.node_count(), 1.0));
  CHECK(est.c_tr >= std::sqrt(m_sigma / mesh.total_area()) * (1.0 - 1e-12));

  const double coarse = estimate_trace_constant(baseline_mesh(8, 48), 100).c_tr;
  const double fine = estimate_trace_constant(baseline_mesh(16, 96), 100).c_tr;
  CHECK(std::abs(fine - coarse) / fine < 0.05);
}

TEST_CASE("substituted identity audit: constant state and Gamma flux match") {
  const Mesh mesh = baseline_mesh();
  const double holdall_area = baseline_spec().holdall_area();

  SUBCASE("datum equal to beta: u = 1, all identity terms cancel") {
    PhysicsParams p;
    p.lambda = 0.8;
    p.beta = 0.8;
    const SubstitutionAudit audit = audit_substituted_identity(mesh, p, holdall_area);
    // flux_sign = +1 branch has g = lambda = beta, so u = 1 and the
    // substitution residual is exactly the (zero) Gamma flux
    CHECK(audit.positive_flux.dirichlet_energy == doctest::Approx(0.0));
    CHECK(std::abs(audit.positive_flux.identity_residual) < 1e-10);
    CHECK(std::abs(audit.positive_flux.gamma_flux_reaction) < 1e-10);
    // the boundary terms themselves are nonzero data
    CHECK(audit.positive_flux.boundary_energy ==
          doctest::Approx(p.beta * audit.m_sigma).epsilon(1e-10));
  }

  SUBCASE("baseline: residual equals the reaction flux and the analytic value") {
    PhysicsParams p; // lambda = 1/e, beta = 1
    const SubstitutionAudit audit = audit_substituted_identity(mesh, p, holdall_area);
    for (const SubstitutionTerms& terms : {audit.positive_flux, audit.negative_flux}) {
      CHECK(std::abs(terms.identity_residual) > 1e-3);
      CHECK(terms.identity_residual ==
            doctest::Approx(terms.gamma_flux_reaction).epsilon(1e-8));
      CHECK(std::abs(terms.lifting_volume_term) < 1e-12);

      // the boxed linear claim sits below the true quadratic-plus-linear
      // sum already at scale one (lambda sqrt|U| >= beta here)
      CHECK(terms.boxed_bound ==
            doctest::Approx(std::max(p.beta, p.lambda * std::sqrt(holdall_area)) *
                            terms.boundary_l2));
      CHECK(terms.quadratic_plus_linear > terms.boxed_bound);
      CHECK(terms.quadratic_plus_linear_msigma <= terms.quadratic_plus_linear);
    }
    // analytic Gamma flux of the radial solution is -2 pi c
    const double c_minus = radial_oracle_robin(1.0, 2.0, -p.lambda, p.beta).coefficient;
    CHECK(audit.negative_flux.identity_residual ==
          doctest::Approx(-2.0 * kPi * c_minus).epsilon(5e-3));
  }
}

TEST_CASE("flawed bound probe finds a scaling witness") {
  const Mesh mesh = baseline_mesh();
  PhysicsParams p; // baseline
  const StateSolution robin = solve_robin(mesh, p);
  const double holdall_area = baseline_spec().holdall_area();

  const FlawedBoundWitness witness = flawed_bound_probe(mesh, robin, holdall_area, 1e4, 81);
  REQUIRE(witness.found);
  CHECK(witness.lhs > witness.rhs);
  CHECK(witness.s >= 1.0);
  // the witness scale is no larger than one grid step above the analytic
  // sufficient threshold
  CHECK(witness.s <= std::max(1.0, witness.sufficient_scale) * std::pow(1e4, 1.0 / 80) + 1e-9);

  SUBCASE("witness scale is stable under refinement") {
    const Mesh fine = baseline_mesh(16, 128);
    const StateSolution robin_fine = solve_robin(fine, p);
    const FlawedBoundWitness w2 = flawed_bound_probe(fine, robin_fine, holdall_area, 1e4, 81);
    REQUIRE(w2.found);
    const double step = std::pow(1e4, 1.0 / 80);
    CHECK(w2.s <= witness.s * step * (1 + 1e-12));
    CHECK(w2.s >= witness.s / step * (1 - 1e-12));
  }

  SUBCASE("degenerate trace is reported, not a witness") {
    StateSolution zero_trace = robin;
    for (int i : mesh.boundary_nodes(BoundaryTag::Sigma)) {
      zero_trace.u[i] = 0.0;
    }
    const FlawedBoundWitness w = flawed_bound_probe(mesh, zero_trace, holdall_area);
    CHECK(w.degenerate);
    CHECK_FALSE(w.found);
  }
}

TEST_CASE("corrected chain holds on the baseline") {
  const Mesh mesh = baseline_mesh();
  PhysicsParams p;
  const double holdall_area = baseline_spec().holdall_area();
  const PfEstimate pf = estimate_pf_constant(mesh, 300);
  const TraceEstimate tr = estimate_trace_constant(mesh, 300);
  const AuditReport rep = audit_consistent_chain(mesh, p, holdall_area, pf, tr);

  CHECK(rep.all_required_hold);
  CHECK(rep.min_required_slack >= kChainSlackTol);
  CHECK(rep.identity_residual_rel <= 1e-9);
  CHECK(rep.u_h1 <= rep.bound_u);
  CHECK(rep.c1 == doctest::Approx(std::min(1.0, p.beta / rep.m_sigma)));
  CHECK(rep.c2 == doctest::Approx(rep.c1 / (2.0 * pf.c_pf * pf.c_pf)));
  CHECK(rep.c2 < rep.c2_printed); // C_pf > 1, so the printed constant is too large
  CHECK(rep.bound_w == doctest::Approx(rep.c3 / rep.c2));
  REQUIRE(rep.links.size() == 10);
  for (const ChainLink& link : rep.links) {
    if (link.required) {
      CHECK(link.slack_rel >= kChainSlackTol);
    }
  }
}

TEST_CASE("C1 matches min{1, beta/m(Sigma)} in both regimes") {
  const Mesh mesh = baseline_mesh();
  const double holdall_area = baseline_spec().holdall_area();
  const PfEstimate pf = estimate_pf_constant(mesh, 100);
  const TraceEstimate tr = estimate_trace_constant(mesh, 100);

  // m(Sigma) ~ 4 pi, so beta = 2 m(Sigma) puts the min at 1
  PhysicsParams big;
  big.beta = 8.0 * kPi;
  const AuditReport rep_big = audit_consistent_chain(mesh, big, holdall_area, pf, tr);
  CHECK(rep_big.c1 == doctest::Approx(1.0));

  PhysicsParams small;
  small.beta = 1.0;
  const AuditReport rep_small = audit_consistent_chain(mesh, small, holdall_area, pf, tr);
  CHECK(rep_small.c1 == doctest::Approx(1.0 / rep_small.m_sigma).epsilon(1e-12));
}

TEST_CASE("datum equal to beta makes every chain term vanish") {
  const Mesh mesh = baseline_mesh();
  PhysicsParams p;
  p.lambda = 1.2;
  p.beta = 1.2;
  p.flux_sign = 1; // g = beta
  const PfEstimate pf = estimate_pf_constant(mesh, 100);
  const TraceEstimate tr = estimate_trace_constant(mesh, 100);
  const AuditReport rep =
      audit_consistent_chain(mesh, p, baseline_spec().holdall_area(), pf, tr);
  CHECK(rep.dirichlet_energy == doctest::Approx(0.0));
  CHECK(rep.boundary_energy == doctest::Approx(0.0));
  CHECK(rep.w_h1 == doctest::Approx(0.0));
  CHECK(rep.all_required_hold);
  CHECK(rep.u_h1 <= rep.bound_u);
}

TEST_CASE("uniform bound survey") {
  PhysicsParams p;

  SUBCASE("concentric family of four radii") {
    std::vector<DomainSpec> family;
    for (double r : {1.5, 2.0, 2.5, 3.0}) {
      family.push_back(build_domain(1.0, {{r, 0.0}}, 5.0));
    }
    const SurveyResult result = uniform_bound_survey(family, p, {6, 48}, 100);
    REQUIRE(result.rows.size() == 4);
    CHECK(result.uniform_bound_holds);
    CHECK(result.max_norm <= result.max_c);
    for (const SurveyRow& row : result.rows) {
      CHECK(row.bounded);
      CHECK(row.u_h1 <= row.chain_c);
    }
  }

  SUBCASE("single-domain survey equals a single audit") {
    const std::vector<DomainSpec> family = {baseline_spec()};
    const SurveyResult result = uniform_bound_survey(family, p, {8, 64}, 100);
    REQUIRE(result.rows.size() == 1);

    const Mesh mesh = baseline_mesh();
    const PfEstimate pf = estimate_pf_constant(mesh, 100);
    const TraceEstimate tr = estimate_trace_constant(mesh, 100);
    const AuditReport rep =
        audit_consistent_chain(mesh, p, baseline_spec().holdall_area(), pf, tr);
    CHECK(result.rows[0].u_h1 == doctest::Approx(rep.u_h1).epsilon(1e-12));
    CHECK(result.rows[0].chain_c == doctest::Approx(rep.bound_u).epsilon(1e-12));
    CHECK(result.max_norm == doctest::Approx(rep.u_h1));
  }
}
