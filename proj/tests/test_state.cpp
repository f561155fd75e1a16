#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bfb/error.hpp"
#include "bfb/random.hpp"
#include "bfb/state.hpp"

using namespace bfb;

namespace {
constexpr double kE = std::numbers::e;

Mesh annulus_mesh(int n_r, int n_theta, double R = 2.0) {
  return generate_mesh(build_domain(1.0, {{R, 0.0}}, 5.0), n_r, n_theta);
}
} // namespace

TEST_CASE("radial Neumann oracle") {
  const RadialSolution flat = radial_oracle_neumann(1.0, 2.0, 0.0);
  CHECK(flat.value(1.3) == doctest::Approx(1.0));

  const RadialSolution sol = radial_oracle_neumann(1.0, 2.0, 1.0);
  CHECK(sol.value(2.0) == doctest::Approx(1.0 + 2.0 * std::log(2.0)).epsilon(1e-14));

  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = uniform(gen, 0.2, 2.0);
    const double R = a + uniform(gen, 0.3, 3.0);
    const double g = uniform(gen, -2.0, 2.0);
    const RadialSolution s = radial_oracle_neumann(a, R, g);
    CHECK(s.radial_derivative(R) * R == doctest::Approx(s.coefficient).epsilon(1e-12));
    CHECK(s.value(a) == doctest::Approx(1.0));
    CHECK(s.radial_derivative(R) == doctest::Approx(g).epsilon(1e-12));
  }

  CHECK_THROWS_AS(radial_oracle_neumann(2.0, 1.0, 1.0), Error);
}

TEST_CASE("radial Robin oracle") {
  CHECK(radial_oracle_robin(1.0, 2.0, 1.5, 1.5).coefficient == doctest::Approx(0.0));
  CHECK(radial_oracle_robin(1.0, kE, -1.0 / kE, 1.0).coefficient ==
        doctest::Approx(-1.0).epsilon(1e-14));

  // Robin boundary condition residual vanishes for random inputs
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = uniform(gen, 0.2, 2.0);
    const double R = a + uniform(gen, 0.3, 3.0);
    const double g = uniform(gen, -2.0, 2.0);
    const double beta = uniform(gen, 0.1, 3.0);
    const RadialSolution s = radial_oracle_robin(a, R, g, beta);
    const double residual = s.radial_derivative(R) + beta * s.value(R) - g;
    CHECK(std::abs(residual) < 1e-12);
    CHECK(s.value(a) == doctest::Approx(1.0));
  }
}

TEST_CASE("bernoulli_radius") {
  CHECK(bernoulli_radius(1.0, 1.0 / kE) == doctest::Approx(kE).epsilon(1e-10));

  // monotone decrease in lambda
  double previous = 1e300;
  for (double lambda : {0.1, 0.2, 0.5, 1.0, 2.0, 5.0}) {
    const double r_star = bernoulli_radius(1.0, lambda);
    CHECK(r_star > 1.0);
    CHECK(r_star < previous);
    previous = r_star;
  }

  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = uniform(gen, 0.2, 3.0);
    const double lambda = uniform(gen, 0.05, 5.0);
    const double r_star = bernoulli_radius(a, lambda);
    CHECK(std::abs(r_star * std::log(r_star / a) - 1.0 / lambda) < 1e-10 * (1.0 / lambda + r_star));
  }
}

TEST_CASE("Neumann solver: zero flux gives the constant state") {
  const Mesh mesh = annulus_mesh(4, 32);
  PhysicsParams p;
  p.lambda = 1e-300; // validate() wants > 0; the load is numerically zero
  p.beta = 1.0;
  const StateSolution sol = solve_neumann(mesh, p);
  for (double v : sol.u) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("state solutions satisfy the structural invariants") {
  const Mesh mesh = annulus_mesh(6, 48);
  PhysicsParams p; // lambda = 1/e, beta = 1, flux_sign = -1
  for (const StateSolution& sol : {solve_neumann(mesh, p), solve_robin(mesh, p)}) {
    REQUIRE(static_cast<int>(sol.u.size()) == mesh.node_count());
    for (int i = 0; i < mesh.node_count(); ++i) {
      CHECK(sol.u[i] == sol.w[i] + 1.0);
    }
    for (int i : mesh.boundary_nodes(BoundaryTag::Gamma)) {
      CHECK(sol.u[i] == 1.0);
      CHECK(sol.w[i] == 0.0);
    }
    CHECK(sol.solve.converged);
  }
}

TEST_CASE("Robin solver: datum equal to beta gives u = 1 exactly") {
  const Mesh mesh = annulus_mesh(4, 32);
  PhysicsParams p;
  p.lambda = 0.7;
  p.beta = 0.7;
  p.flux_sign = 1; // datum g = +0.7 = beta
  const StateSolution sol = solve_robin(mesh, p);
  for (double v : sol.u) CHECK(v == 1.0);
  CHECK(sol.solve.iterations == 0);
}

TEST_CASE("FEM solutions converge to the radial oracles") {
  PhysicsParams p; // lambda = 1/e, beta = 1, flux_sign = -1
  const double g = p.boundary_flux();
  const RadialSolution oracle_n = radial_oracle_neumann(1.0, 2.0, g);
  const RadialSolution oracle_r = radial_oracle_robin(1.0, 2.0, g, p.beta);

  double l2_n[2], h1_n[2], l2_r[2], h1_r[2];
  for (int level = 0; level < 2; ++level) {
    const int n = 16 << level;
    const Mesh mesh = annulus_mesh(n, 4 * n);
    const Forms forms = Forms::assemble(mesh);
    const OracleError en = compare_to_radial(mesh, solve_neumann(mesh, forms, p).u, oracle_n);
    const OracleError er = compare_to_radial(mesh, solve_robin(mesh, forms, p).u, oracle_r);
    l2_n[level] = en.l2;
    h1_n[level] = en.h1_semi;
    l2_r[level] = er.l2;
    h1_r[level] = er.h1_semi;
  }
  CHECK(l2_n[0] / l2_n[1] == doctest::Approx(4.0).epsilon(0.15));
  CHECK(l2_r[0] / l2_r[1] == doctest::Approx(4.0).epsilon(0.15));
  CHECK(h1_n[0] / h1_n[1] == doctest::Approx(2.0).epsilon(0.12));
  CHECK(h1_r[0] / h1_r[1] == doctest::Approx(2.0).epsilon(0.12));
}

TEST_CASE("at the Bernoulli radius the Neumann trace vanishes and u_N = u_R") {
  PhysicsParams p; // lambda = 1/e, flux_sign = -1, beta = 1
  double previous_gap = 1e300;
  double previous_trace = 1e300;
  for (int level = 0; level < 2; ++level) {
    const int n = 8 << level;
    const Mesh mesh = generate_mesh(build_domain(1.0, {{kE, 0.0}}, 5.0), n, 4 * n);
    const Forms forms = Forms::assemble(mesh);
    const StateSolution un = solve_neumann(mesh, forms, p);
    const StateSolution ur = solve_robin(mesh, forms, p);

    double max_trace = 0.0;
    for (int i : mesh.boundary_nodes(BoundaryTag::Sigma)) {
      max_trace = std::max(max_trace, std::abs(un.u[i]));
    }
    CHECK(max_trace < previous_trace);

    FieldVector diff(un.u.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = un.u[i] - ur.u[i];
    const double gap = h1_norm(forms, diff);
    CHECK(gap < previous_gap);
    if (level == 1) {
      CHECK(max_trace < 0.01);
      CHECK(gap < 0.01);
    }
    previous_trace = max_trace;
    previous_gap = gap;
  }
}

TEST_CASE("discrete maximum principle surrogate on concentric meshes") {
  PhysicsParams p; // flux_sign = -1
  for (double beta : {0.5, 1.0, 2.0}) {
    p.beta = beta;
    const Mesh mesh = annulus_mesh(8, 32);
    for (const StateSolution& sol : {solve_neumann(mesh, p), solve_robin(mesh, p)}) {
      for (double v : sol.u) {
        CHECK(v <= 1.0 + 1e-8);
        CHECK(v >= -1e-8);
      }
    }
  }
}

TEST_CASE("lifted solve matches direct boundary-value elimination") {
  const Mesh mesh = annulus_mesh(4, 32);
  const Forms forms = Forms::assemble(mesh);
  PhysicsParams p;
  const StateSolution lifted = solve_robin(mesh, forms, p, 1e-12);

  // Direct route: constrain u = 1 on Gamma with the indicator correction
  // rhs_f - A_fc * 1_c instead of the global-ones lifting.
  SparseBuilder builder(mesh.node_count());
  const SparseSpd& k = forms.stiffness;
  for (int i = 0; i < k.n; ++i) {
    for (int idx = k.row_ptr[i]; idx < k.row_ptr[i + 1]; ++idx) {
      builder.add(i, k.col_idx[idx], k.values[idx]);
    }
  }
  const SparseSpd& ms = forms.sigma_mass;
  for (int i = 0; i < ms.n; ++i) {
    for (int idx = ms.row_ptr[i]; idx < ms.row_ptr[i + 1]; ++idx) {
      builder.add(i, ms.col_idx[idx], p.beta * ms.values[idx]);
    }
  }
  const SparseSpd a = builder.compress();
  const FieldVector load = assemble_boundary_load(mesh, p.boundary_flux());

  const std::vector<int> gamma = mesh.boundary_nodes(BoundaryTag::Gamma);
  std::vector<int> full_to_free(mesh.node_count(), 0);
  for (int i : gamma) full_to_free[i] = -1;
  std::vector<int> free_nodes;
  for (int i = 0; i < mesh.node_count(); ++i) {
    if (full_to_free[i] == 0) {
      full_to_free[i] = static_cast<int>(free_nodes.size());
      free_nodes.push_back(i);
    }
  }
  SparseBuilder reduced(static_cast<int>(free_nodes.size()));
  FieldVector rhs(free_nodes.size());
  for (std::size_t f = 0; f < free_nodes.size(); ++f) {
    const int i = free_nodes[f];
    rhs[f] = load[i];
    for (int idx = a.row_ptr[i]; idx < a.row_ptr[i + 1]; ++idx) {
      const int j = a.col_idx[idx];
      if (full_to_free[j] >= 0) {
        reduced.add(static_cast<int>(f), full_to_free[j], a.values[idx]);
      } else {
        rhs[f] -= a.values[idx] * 1.0; // A_fc * 1_c
      }
    }
  }
  const CgResult direct = solve_spd(reduced.compress(), rhs, 1e-12);
  for (std::size_t f = 0; f < free_nodes.size(); ++f) {
    CHECK(lifted.u[free_nodes[f]] == doctest::Approx(direct.x[f]).epsilon(1e-8));
  }
}

TEST_CASE("solution csv shape") {
  const Mesh mesh = annulus_mesh(1, 8);
  PhysicsParams p;
  const StateSolution sol = solve_neumann(mesh, p);
  const std::string csv = solution_csv(mesh, sol.u);
  CHECK(csv.rfind("node_index,x,y,u\n", 0) == 0);
  int lines = 0;
  for (char ch : csv) {
    if (ch == '\n') ++lines;
  }
  CHECK(lines == mesh.node_count() + 1);
}
