#include "bfb/artifacts.hpp"

#include <cstdio>
#include <fstream>

#include "bfb/error.hpp"

namespace bfb {

using nlohmann::json;

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error("cannot write " + tmp.string());
    }
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

json to_json(const SolveInfo& info) {
  return {{"iterations", info.iterations},
          {"relative_residual", info.relative_residual},
          {"converged", info.converged}};
}

json to_json(const PhysicsParams& p) {
  return {{"lambda", p.lambda}, {"beta", p.beta}, {"flux_sign", p.flux_sign}};
}

json to_json(const CostReport& report) {
  return {{"j", report.j},
          {"semi_neumann_sq", report.semi_neumann_sq},
          {"semi_robin_sq", report.semi_robin_sq},
          {"cross", report.cross},
          {"n_r", report.resolution.n_r},
          {"n_theta", report.resolution.n_theta},
          {"physics", to_json(report.params)}};
}

json to_json(const PfEstimate& est) {
  return {{"c_pf", est.c_pf},
          {"mu_max", est.mu_max},
          {"n_r", est.n_r},
          {"n_theta", est.n_theta},
          {"cert_samples", est.cert_samples},
          {"worst_cert_slack", est.worst_cert_slack},
          {"iterations", est.iterations}};
}

json to_json(const TraceEstimate& est) {
  return {{"c_tr", est.c_tr},
          {"nu_max", est.nu_max},
          {"cert_samples", est.cert_samples},
          {"worst_cert_slack", est.worst_cert_slack},
          {"iterations", est.iterations}};
}

json to_json(const SubstitutionTerms& terms) {
  return {{"flux_sign", terms.flux_sign},
          {"datum", terms.datum},
          {"dirichlet_energy", terms.dirichlet_energy},
          {"lifting_volume_term", terms.lifting_volume_term},
          {"boundary_energy", terms.boundary_energy},
          {"datum_linear_term", terms.datum_linear_term},
          {"identity_residual", terms.identity_residual},
          {"gamma_flux_reaction", terms.gamma_flux_reaction},
          {"boundary_l2", terms.boundary_l2},
          {"boxed_bound", terms.boxed_bound},
          {"quadratic_plus_linear", terms.quadratic_plus_linear},
          {"quadratic_plus_linear_msigma", terms.quadratic_plus_linear_msigma},
          {"solve", to_json(terms.solve)}};
}

json to_json(const SubstitutionAudit& audit) {
  return {{"positive_flux", to_json(audit.positive_flux)},
          {"negative_flux", to_json(audit.negative_flux)},
          {"m_sigma", audit.m_sigma},
          {"holdall_area", audit.holdall_area}};
}

json to_json(const FlawedBoundWitness& witness) {
  return {{"found", witness.found},
          {"degenerate", witness.degenerate},
          {"s", witness.s},
          {"lhs", witness.lhs},
          {"rhs", witness.rhs},
          {"sufficient_scale", witness.sufficient_scale}};
}

json to_json(const AuditReport& report) {
  json links = json::array();
  for (const ChainLink& link : report.links) {
    links.push_back({{"name", link.name},
                     {"lhs", link.lhs},
                     {"rhs", link.rhs},
                     {"slack_rel", link.slack_rel},
                     {"constant", link.constant},
                     {"required", link.required}});
  }
  return {{"dirichlet_energy", report.dirichlet_energy},
          {"boundary_energy", report.boundary_energy},
          {"rhs_linear", report.rhs_linear},
          {"lifting_volume_term", report.lifting_volume_term},
          {"identity_residual_rel", report.identity_residual_rel},
          {"sigma_integral", report.sigma_integral},
          {"w_h1", report.w_h1},
          {"w_sigma_l2", report.w_sigma_l2},
          {"u_h1", report.u_h1},
          {"u_sigma_l2", report.u_sigma_l2},
          {"m_sigma", report.m_sigma},
          {"holdall_area", report.holdall_area},
          {"omega_area", report.omega_area},
          {"c1", report.c1},
          {"c2", report.c2},
          {"c2_printed", report.c2_printed},
          {"c3", report.c3},
          {"c3_printed", report.c3_printed},
          {"c_pf", report.c_pf},
          {"c_tr", report.c_tr},
          {"bound_w", report.bound_w},
          {"bound_u", report.bound_u},
          {"links", links},
          {"all_required_hold", report.all_required_hold},
          {"min_required_slack", report.min_required_slack},
          {"solve", to_json(report.solve)}};
}

json to_json(const SurveyResult& result) {
  json rows = json::array();
  for (const SurveyRow& row : result.rows) {
    rows.push_back({{"index", row.index},
                    {"mean_radius", row.mean_radius},
                    {"u_h1", row.u_h1},
                    {"chain_c", row.chain_c},
                    {"min_slack", row.min_slack},
                    {"bounded", row.bounded}});
  }
  return {{"rows", rows},
          {"max_norm", result.max_norm},
          {"max_c", result.max_c},
          {"uniform_bound_holds", result.uniform_bound_holds}};
}

json to_json(const OptimTrajectory& traj, int max_k) {
  const std::vector<std::string> names = parameter_names(max_k);
  json records = json::array();
  for (const OptimRecord& rec : traj.records) {
    json coeffs = json::object();
    for (std::size_t i = 0; i < rec.coefficients.size(); ++i) {
      coeffs[names[i]] = rec.coefficients[i];
    }
    records.push_back({{"iteration", rec.iteration},
                       {"coefficients", coeffs},
                       {"j", rec.j},
                       {"gradient_norm", rec.gradient_norm},
                       {"accepted", rec.accepted}});
  }
  json final_coeffs = json::object();
  const std::vector<double> final_params = flatten_coefficients(traj.final_spec);
  for (std::size_t i = 0; i < final_params.size(); ++i) {
    final_coeffs[names[i]] = final_params[i];
  }
  return {{"records", records},
          {"status", to_string(traj.status)},
          {"final_coefficients", final_coeffs},
          {"final_j", traj.final_j},
          {"iterations", traj.records.empty() ? 0 : traj.records.back().iteration}};
}

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

std::string chain_links_csv(const AuditReport& report) {
  std::string csv = "name,lhs,rhs,slack_rel,constant,required\n";
  for (const ChainLink& link : report.links) {
    csv += link.name + "," + fmt(link.lhs) + "," + fmt(link.rhs) + "," +
           fmt(link.slack_rel) + "," + fmt(link.constant) + "," +
           (link.required ? "1" : "0") + "\n";
  }
  return csv;
}

std::string survey_csv(const SurveyResult& result) {
  std::string csv = "index,mean_radius,u_h1,chain_c,min_slack,bounded\n";
  for (const SurveyRow& row : result.rows) {
    csv += std::to_string(row.index) + "," + fmt(row.mean_radius) + "," + fmt(row.u_h1) +
           "," + fmt(row.chain_c) + "," + fmt(row.min_slack) + "," +
           (row.bounded ? "1" : "0") + "\n";
  }
  return csv;
}

std::string trajectory_csv(const OptimTrajectory& traj, int max_k) {
  const std::vector<std::string> names = parameter_names(max_k);
  std::string csv = "iteration";
  for (const std::string& name : names) {
    csv += "," + name;
  }
  csv += ",j,gradient_norm,accepted\n";
  for (const OptimRecord& rec : traj.records) {
    csv += std::to_string(rec.iteration);
    for (double c : rec.coefficients) {
      csv += "," + fmt(c);
    }
    csv += "," + fmt(rec.j) + "," + fmt(rec.gradient_norm) + "," +
           (rec.accepted ? "1" : "0") + "\n";
  }
  return csv;
}

Manifest::Manifest(std::filesystem::path out_dir, std::string command)
    : out_dir_(std::move(out_dir)), command_(std::move(command)) {
  std::filesystem::create_directories(out_dir_);
}

void Manifest::emit(const std::string& name, const std::string& content) {
  write_file_atomic(out_dir_ / name, content);
  files_.push_back(name);
}

void Manifest::write() {
  files_.push_back("manifest.json");
  json manifest = {{"command", command_}, {"files", files_}};
  write_file_atomic(out_dir_ / "manifest.json", manifest.dump(2) + "\n");
}

} // namespace bfb
