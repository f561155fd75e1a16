#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "bfb/audit.hpp"
#include "bfb/cost.hpp"
#include "bfb/optimize.hpp"

namespace bfb {

/// Writes through a temp file in the same directory, then renames, so a
/// crashed run never leaves a truncated artifact.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

nlohmann::json to_json(const SolveInfo& info);
nlohmann::json to_json(const PhysicsParams& p);
nlohmann::json to_json(const CostReport& report);
nlohmann::json to_json(const PfEstimate& est);
nlohmann::json to_json(const TraceEstimate& est);
nlohmann::json to_json(const SubstitutionTerms& terms);
nlohmann::json to_json(const SubstitutionAudit& audit);
nlohmann::json to_json(const FlawedBoundWitness& witness);
nlohmann::json to_json(const AuditReport& report);
nlohmann::json to_json(const SurveyResult& result);
nlohmann::json to_json(const OptimTrajectory& traj, int max_k);

std::string chain_links_csv(const AuditReport& report);
std::string survey_csv(const SurveyResult& result);
std::string trajectory_csv(const OptimTrajectory& traj, int max_k);

/// Tracks every emitted file; written last as manifest.json.
class Manifest {
public:
  Manifest(std::filesystem::path out_dir, std::string command);

  /// Atomically writes out_dir/name and records it.
  void emit(const std::string& name, const std::string& content);
  void write();

private:
  std::filesystem::path out_dir_;
  std::string command_;
  std::vector<std::string> files_;
};

} // namespace bfb
