#pragma once

#include <string>
#include <vector>

#include "bfb/cost.hpp"

namespace bfb {

enum class OptimMethod { FdGradientDescent, NelderMead };

struct OptimConfig {
  OptimMethod method = OptimMethod::FdGradientDescent;
  double initial_step = 0.5;
  double shrink = 0.5;
  double armijo = 1e-4;
  double min_step = 1e-8;
  double j_tol = 1e-8;
  double grad_tol = 1e-6;
  int max_iters = 100;
  MeshResolution resolution;
  double fd_step = 1e-3;

  void validate() const; // throws bfb::Error on non-positive tolerances
};

struct OptimRecord {
  int iteration = 0;
  std::vector<double> coefficients; // flat shape parameters
  double j = 0.0;
  double gradient_norm = 0.0; // simplex spread for Nelder-Mead
  bool accepted = true;
};

enum class OptimStatus { JTolReached, GradTolReached, MaxIters, Stalled };

std::string to_string(OptimStatus status);

struct OptimTrajectory {
  std::vector<OptimRecord> records;
  OptimStatus status = OptimStatus::MaxIters;
  DomainSpec final_spec;
  double final_j = 0.0;
};

/// Minimizes J over the flat shape parameters starting from an admissible
/// spec. Gradient descent backtracks (Armijo sufficient decrease) and
/// shrinks any step whose endpoint is inadmissible, so every recorded
/// iterate is admissible; it stops on J <= j_tol, ||grad|| <= grad_tol,
/// max_iters, or when no admissible decreasing step of at least min_step
/// exists ("stalled"). Nelder-Mead treats inadmissible vertices as +inf.
OptimTrajectory optimize_shape(const DomainSpec& initial, const PhysicsParams& p,
                               const AdmissibilityLimits& limits, const OptimConfig& cfg);

} // namespace bfb
