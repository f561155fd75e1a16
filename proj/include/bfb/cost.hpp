#pragma once

#include <vector>

#include "bfb/state.hpp"

namespace bfb {

struct MeshResolution {
  int n_r = 16;
  int n_theta = 64;
};

/// Energy-gap cost J = |u_N - u_R|^2 in the H1 seminorm, with the
/// seminorm parts that reconstruct it.
struct CostReport {
  double j = 0.0;
  double semi_neumann_sq = 0.0; // u_N^T K u_N
  double semi_robin_sq = 0.0;   // u_R^T K u_R
  double cross = 0.0;           // u_N^T K u_R
  MeshResolution resolution;
  PhysicsParams params;
};

/// J = d^T K d with d = u_N - u_R. Both solutions must live on the mesh.
CostReport energy_gap(const Mesh& mesh, const StateSolution& neumann,
                      const StateSolution& robin);
CostReport energy_gap(const Mesh& mesh, const Forms& forms, const StateSolution& neumann,
                      const StateSolution& robin);

/// Mesh + both state solves + energy gap for one domain.
CostReport evaluate_cost(const DomainSpec& spec, const PhysicsParams& p,
                         MeshResolution resolution);

/// Flat shape-parameter vector [cos_0, cos_1, sin_1, ..., cos_K, sin_K]
/// (sin_0 never contributes and is not a parameter).
std::vector<double> flatten_coefficients(const DomainSpec& spec);
DomainSpec with_coefficients(const DomainSpec& spec, const std::vector<double>& params);
std::vector<std::string> parameter_names(int max_k);

/// Central finite differences of J in each flat shape parameter, remeshing
/// each perturbed domain at the same resolution. Throws bfb::Error naming
/// the offending parameter if a perturbed domain is inadmissible.
std::vector<double> shape_gradient_fd(const DomainSpec& spec, const PhysicsParams& p,
                                      const AdmissibilityLimits& limits,
                                      MeshResolution resolution, double fd_step = 1e-3);

} // namespace bfb
