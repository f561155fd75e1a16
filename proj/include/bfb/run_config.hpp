#pragma once

#include <string>
#include <vector>

#include "bfb/audit.hpp"
#include "bfb/geometry.hpp"
#include "bfb/optimize.hpp"
#include "bfb/state.hpp"

namespace bfb {

/// Everything a CLI run needs, parsed from one JSON file. Parsing is strict:
/// unknown keys anywhere are rejected, and all values are validated before
/// any computation starts.
struct RunConfig {
  DomainSpec domain;
  PhysicsParams physics;
  MeshResolution mesh;
  AdmissibilityLimits admissibility;

  double solver_tol = 1e-10;
  int solver_max_iters = 0; // 0 = 10 * unknown count

  OptimConfig optimizer;

  double audit_s_max = 1e4;
  int audit_s_grid_points = 41;
  int audit_cert_samples = 1000;

  // survey family: either explicit concentric radii or seeded Fourier
  // perturbations around the configured domain
  std::string survey_kind = "fourier"; // "fourier" | "radii"
  std::vector<double> survey_radii = {1.5, 2.0, 2.5, 3.0};
  int survey_count = 50;
  int survey_max_k = 3;
  double survey_amplitude = 0.2;
  unsigned long long survey_seed = 42;

  std::vector<int> convergence_n = {16, 32, 64, 128};

  std::string output_dir = "out";
};

/// Parses and validates; throws bfb::Error with a readable message on any
/// schema or value problem.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);

/// The seeded random family used by the survey command (rejection-sampled
/// until admissible, deterministic for a fixed seed).
std::vector<DomainSpec> survey_family(const RunConfig& cfg);

} // namespace bfb
