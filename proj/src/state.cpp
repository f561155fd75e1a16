#include "bfb/state.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "bfb/error.hpp"

namespace bfb {

void PhysicsParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error("physics: lambda must be positive and finite");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error("physics: beta must be positive and finite");
  }
  if (flux_sign != 1 && flux_sign != -1) {
    throw Error("physics: flux_sign must be +1 or -1");
  }
}

namespace {

StateSolution solve_state(const Mesh& mesh, const Forms& forms, const PhysicsParams& p,
                          StateKind kind, double tol, int max_iters) {
  p.validate();
  const double g = p.boundary_flux();

  SparseSpd system = forms.stiffness;
  if (kind == StateKind::Robin) {
    // K + beta * M_Sigma, merged into one CSR matrix.
    SparseBuilder builder(system.n);
    for (int i = 0; i < system.n; ++i) {
      for (int k = system.row_ptr[i]; k < system.row_ptr[i + 1]; ++k) {
        builder.add(i, system.col_idx[k], system.values[k]);
      }
    }
    const SparseSpd& ms = forms.sigma_mass;
    for (int i = 0; i < ms.n; ++i) {
      for (int k = ms.row_ptr[i]; k < ms.row_ptr[i + 1]; ++k) {
        builder.add(i, ms.col_idx[k], p.beta * ms.values[k]);
      }
    }
    system = builder.compress();
  }

  // The lifting u0 = 1 has zero gradient, so its volume correction term is
  // asserted to vanish instead of being added to the rhs; the Robin
  // boundary correction -beta * integral_Sigma(u0 phi) enters analytically
  // through the (g - beta) datum. With this form the g = beta case yields
  // a bitwise-zero rhs and u = 1 exactly.
  const FieldVector k_ones = forms.stiffness.multiply(FieldVector(mesh.node_count(), 1.0));
  for (double v : k_ones) {
    if (std::abs(v) > 1e-10) {
      throw Error("solve_state: stiffness kernel violation, K*ones is not ~0");
    }
  }
  const FieldVector load =
      assemble_boundary_load(mesh, kind == StateKind::Robin ? g - p.beta : g);
  const DirichletSystem reduced =
      apply_dirichlet(system, load, mesh.boundary_nodes(BoundaryTag::Gamma), 0.0);

  CgResult cg = solve_spd(reduced.reduced, reduced.reduced_rhs, tol, max_iters);

  StateSolution sol;
  sol.kind = kind;
  sol.params = p;
  sol.solve = cg.info;
  sol.w = reduced.expand(cg.x);
  sol.u = sol.w;
  for (double& v : sol.u) {
    v += 1.0;
  }
  return sol;
}

} // namespace

StateSolution solve_neumann(const Mesh& mesh, const Forms& forms, const PhysicsParams& p,
                            double tol, int max_iters) {
  return solve_state(mesh, forms, p, StateKind::Neumann, tol, max_iters);
}

StateSolution solve_neumann(const Mesh& mesh, const PhysicsParams& p, double tol,
                            int max_iters) {
  return solve_state(mesh, Forms::assemble(mesh), p, StateKind::Neumann, tol, max_iters);
}

StateSolution solve_robin(const Mesh& mesh, const Forms& forms, const PhysicsParams& p,
                          double tol, int max_iters) {
  return solve_state(mesh, forms, p, StateKind::Robin, tol, max_iters);
}

StateSolution solve_robin(const Mesh& mesh, const PhysicsParams& p, double tol,
                          int max_iters) {
  return solve_state(mesh, Forms::assemble(mesh), p, StateKind::Robin, tol, max_iters);
}

double RadialSolution::value(double r) const {
  return 1.0 + coefficient * std::log(r / a);
}

double RadialSolution::radial_derivative(double r) const {
  return coefficient / r;
}

RadialSolution radial_oracle_neumann(double a, double R, double g) {
  if (!(0.0 < a && a < R)) {
    throw Error("radial oracle: need 0 < a < R");
  }
  return {a, R, g * R};
}

RadialSolution radial_oracle_robin(double a, double R, double g, double beta) {
  if (!(0.0 < a && a < R)) {
    throw Error("radial oracle: need 0 < a < R");
  }
  const double denom = 1.0 / R + beta * std::log(R / a);
  return {a, R, (g - beta) / denom};
}

double bernoulli_radius(double a, double lambda) {
  if (!(a > 0.0) || !(lambda > 0.0)) {
    throw Error("bernoulli_radius: need a > 0 and lambda > 0");
  }
  // f(R) = R ln(R/a) - 1/lambda is strictly increasing for R >= a with
  // f(a) < 0, so bisection on a bracket [a, hi] is safe.
  auto f = [a, lambda](double R) { return R * std::log(R / a) - 1.0 / lambda; };
  double lo = a;
  double hi = 2.0 * a;
  while (f(hi) < 0.0) {
    hi *= 2.0;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-12 * hi) {
      break;
    }
  }
  return 0.5 * (lo + hi);
}

OracleError compare_to_radial(const Mesh& mesh, const FieldVector& u,
                              const RadialSolution& oracle) {
  // Degree-4 rule, 6 points per triangle (two orbits of barycentric points).
  static const double w1 = 0.223381589678011;
  static const double w2 = 0.109951743655322;
  static const double a1 = 0.445948490915965;
  static const double a2 = 0.091576213509771;
  static const double quad[6][4] = {
      {1 - 2 * a1, a1, a1, w1}, {a1, 1 - 2 * a1, a1, w1}, {a1, a1, 1 - 2 * a1, w1},
      {1 - 2 * a2, a2, a2, w2}, {a2, 1 - 2 * a2, a2, w2}, {a2, a2, 1 - 2 * a2, w2}};

  double l2_sq = 0.0;
  double h1_sq = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const auto& p0 = mesh.nodes[tri[0]];
    const auto& p1 = mesh.nodes[tri[1]];
    const auto& p2 = mesh.nodes[tri[2]];
    const double det =
        (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    const double area = 0.5 * det;

    // constant P1 gradient on the triangle
    const double gx = (u[tri[0]] * (p1[1] - p2[1]) + u[tri[1]] * (p2[1] - p0[1]) +
                       u[tri[2]] * (p0[1] - p1[1])) /
                      det;
    const double gy = (u[tri[0]] * (p2[0] - p1[0]) + u[tri[1]] * (p0[0] - p2[0]) +
                       u[tri[2]] * (p1[0] - p0[0])) /
                      det;

    for (const auto& q : quad) {
      const double x = q[0] * p0[0] + q[1] * p1[0] + q[2] * p2[0];
      const double y = q[0] * p0[1] + q[1] * p1[1] + q[2] * p2[1];
      const double r = std::hypot(x, y);
      const double uh = q[0] * u[tri[0]] + q[1] * u[tri[1]] + q[2] * u[tri[2]];
      const double diff = uh - oracle.value(r);
      // grad of c ln(r/a) is c (x, y) / r^2
      const double ex = gx - oracle.coefficient * x / (r * r);
      const double ey = gy - oracle.coefficient * y / (r * r);
      l2_sq += q[3] * area * diff * diff;
      h1_sq += q[3] * area * (ex * ex + ey * ey);
    }
  }
  return {std::sqrt(l2_sq), std::sqrt(h1_sq)};
}

std::string solution_csv(const Mesh& mesh, const FieldVector& u) {
  std::ostringstream out;
  out << "node_index,x,y,u\n";
  char buf[120];
  for (int i = 0; i < mesh.node_count(); ++i) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", i, mesh.nodes[i][0],
                  mesh.nodes[i][1], u[i]);
    out << buf;
  }
  return out.str();
}

} // namespace bfb
