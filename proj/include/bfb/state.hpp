#pragma once

#include <string>

#include "bfb/fem.hpp"
#include "bfb/geometry.hpp"

namespace bfb {

/// Physics of the two auxiliary state problems. The flux datum applied on
/// Sigma is flux_sign * lambda: with flux_sign = -1 the energy gap vanishes
/// at the Bernoulli configuration (a harmonic field with u = 1 on Gamma has
/// negative outward flux on Sigma); flux_sign = +1 keeps the literal datum
/// for the boundedness audit.
struct PhysicsParams {
  double lambda = 0.36787944117144233; // 1/e
  double beta = 1.0;
  int flux_sign = -1;

  double boundary_flux() const { return flux_sign * lambda; }
  void validate() const; // throws bfb::Error on bad values
};

enum class StateKind { Neumann, Robin };

/// A solved state problem: full solution u (= 1 on Gamma exactly) and its
/// lifted part w = u - 1 (= 0 on Gamma exactly).
struct StateSolution {
  StateKind kind = StateKind::Neumann;
  FieldVector u;
  FieldVector w;
  PhysicsParams params;
  SolveInfo solve;
};

/// Laplace with u = 1 on Gamma and flux datum g = flux_sign*lambda on Sigma.
StateSolution solve_neumann(const Mesh& mesh, const PhysicsParams& p, double tol = 1e-10,
                            int max_iters = 0);
StateSolution solve_neumann(const Mesh& mesh, const Forms& forms, const PhysicsParams& p,
                            double tol = 1e-10, int max_iters = 0);

/// Laplace with u = 1 on Gamma and Robin datum du/dn + beta*u = g on Sigma.
/// The lifted system carries the -beta * (Sigma mass * ones) correction so
/// the discrete solution satisfies the Robin condition consistently.
StateSolution solve_robin(const Mesh& mesh, const PhysicsParams& p, double tol = 1e-10,
                          int max_iters = 0);
StateSolution solve_robin(const Mesh& mesh, const Forms& forms, const PhysicsParams& p,
                          double tol = 1e-10, int max_iters = 0);

/// Closed-form state solution on a concentric annulus a < r < R:
/// u(r) = 1 + c ln(r/a).
struct RadialSolution {
  double a = 1.0;
  double R = 2.0;
  double coefficient = 0.0; // c

  double value(double r) const;
  double radial_derivative(double r) const;
};

/// c = g R, so that u'(R) = g.
RadialSolution radial_oracle_neumann(double a, double R, double g);

/// c = (g - beta) / (1/R + beta ln(R/a)), so that u'(R) + beta u(R) = g.
RadialSolution radial_oracle_robin(double a, double R, double g, double beta);

/// Unique R > a with R ln(R/a) = 1/lambda, found by bisection to 1e-12.
/// At this radius the Dirichlet-Dirichlet radial solution has outward flux
/// -lambda on Sigma.
double bernoulli_radius(double a, double lambda);

/// True discretization errors of a P1 field against a radial oracle,
/// integrated triangle by triangle with a degree-4 quadrature rule.
struct OracleError {
  double l2 = 0.0;
  double h1_semi = 0.0;
};

OracleError compare_to_radial(const Mesh& mesh, const FieldVector& u,
                              const RadialSolution& oracle);

/// CSV export "node_index,x,y,u".
std::string solution_csv(const Mesh& mesh, const FieldVector& u);

} // namespace bfb
