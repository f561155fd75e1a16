// bfb - exterior Bernoulli free boundary solver, shape optimizer, and
// boundedness-estimate auditor. One command per process; every numeric
// output is deterministic for a fixed config.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bfb/artifacts.hpp"
#include "bfb/audit.hpp"
#include "bfb/cost.hpp"
#include "bfb/error.hpp"
#include "bfb/optimize.hpp"
#include "bfb/run_config.hpp"
#include "bfb/state.hpp"
#include "bfb/svg.hpp"

namespace {

using bfb::RunConfig;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitAudit = 4;

struct CliArgs {
  std::string command;
  std::string config_path;
  std::string out_dir; // overrides config output_dir when set
  bool quiet = false;
};

void say(const CliArgs& args, const std::string& line) {
  if (!args.quiet) {
    std::cout << line << "\n";
  }
}

std::vector<bfb::SvgSeries> boundary_curves(const std::vector<bfb::DomainSpec>& specs,
                                            const std::vector<std::string>& labels,
                                            const std::vector<std::string>& colors,
                                            const std::vector<bool>& dashed) {
  constexpr int kSamples = 256;
  std::vector<bfb::SvgSeries> curves;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    bfb::SvgSeries curve;
    curve.label = labels[s];
    curve.color = colors[s];
    curve.dashed = dashed[s];
    for (int i = 0; i < kSamples; ++i) {
      const double theta = 2.0 * std::numbers::pi * i / kSamples;
      const double rho = specs[s].outer_radius(theta);
      curve.x.push_back(rho * std::cos(theta));
      curve.y.push_back(rho * std::sin(theta));
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

int run_solve(const CliArgs& args, const RunConfig& cfg) {
  const bfb::Mesh mesh = bfb::generate_mesh(cfg.domain, cfg.mesh.n_r, cfg.mesh.n_theta);
  const bfb::Forms forms = bfb::Forms::assemble(mesh);
  const bfb::StateSolution neumann =
      bfb::solve_neumann(mesh, forms, cfg.physics, cfg.solver_tol, cfg.solver_max_iters);
  const bfb::StateSolution robin =
      bfb::solve_robin(mesh, forms, cfg.physics, cfg.solver_tol, cfg.solver_max_iters);
  const bfb::CostReport cost = bfb::energy_gap(mesh, forms, neumann, robin);

  bfb::Manifest manifest(args.out_dir, "solve");
  json report = {{"command", "solve"},
                 {"cost", bfb::to_json(cost)},
                 {"neumann_solve", bfb::to_json(neumann.solve)},
                 {"robin_solve", bfb::to_json(robin.solve)},
                 {"mesh", {{"nodes", mesh.node_count()},
                           {"triangles", mesh.triangles.size()},
                           {"area", mesh.total_area()}}}};
  manifest.emit("report.json", report.dump(2) + "\n");
  manifest.emit("u_neumann.csv", bfb::solution_csv(mesh, neumann.u));
  manifest.emit("u_robin.csv", bfb::solution_csv(mesh, robin.u));
  manifest.emit("mesh.txt", bfb::export_mesh(mesh));
  manifest.write();
  char line[160];
  std::snprintf(line, sizeof line, "solve: J = %.12g on %d nodes", cost.j,
                mesh.node_count());
  say(args, line);
  return kExitOk;
}

int run_optimize(const CliArgs& args, const RunConfig& cfg) {
  bfb::OptimConfig opt = cfg.optimizer;
  opt.resolution = cfg.mesh;
  const bfb::OptimTrajectory traj =
      bfb::optimize_shape(cfg.domain, cfg.physics, cfg.admissibility, opt);
  const int max_k = static_cast<int>(cfg.domain.fourier.size()) - 1;

  bfb::Manifest manifest(args.out_dir, "optimize");
  json report = {{"command", "optimize"}, {"trajectory", bfb::to_json(traj, max_k)}};
  manifest.emit("report.json", report.dump(2) + "\n");
  manifest.emit("trajectory.csv", bfb::trajectory_csv(traj, max_k));

  manifest.emit("boundary_evolution.svg",
                bfb::svg_closed_curves(
                    boundary_curves({cfg.domain, traj.final_spec,
                                     bfb::build_domain(cfg.domain.inner_radius,
                                                       {{cfg.domain.inner_radius, 0.0}},
                                                       cfg.domain.holdall_radius)},
                                    {"initial", "final", "Gamma"},
                                    {"#888888", "#d62728", "#1f77b4"},
                                    {true, false, false}),
                    "Boundary evolution"));

  bfb::SvgSeries j_curve;
  j_curve.label = "J";
  for (const bfb::OptimRecord& rec : traj.records) {
    j_curve.x.push_back(rec.iteration);
    j_curve.y.push_back(rec.j);
  }
  manifest.emit("j_vs_iteration.svg",
                bfb::svg_line_chart({j_curve}, "Energy gap per iteration", "iteration", "J",
                                    false, true));
  manifest.write();
  char line[200];
  std::snprintf(line, sizeof line, "optimize: status=%s final J = %.12g after %d records",
                bfb::to_string(traj.status).c_str(), traj.final_j,
                static_cast<int>(traj.records.size()));
  say(args, line);
  return kExitOk;
}

int run_audit(const CliArgs& args, const RunConfig& cfg) {
  const bfb::Mesh mesh = bfb::generate_mesh(cfg.domain, cfg.mesh.n_r, cfg.mesh.n_theta);
  const double holdall_area = cfg.domain.holdall_area();

  const bfb::PfEstimate pf = bfb::estimate_pf_constant(mesh, cfg.audit_cert_samples);
  const bfb::TraceEstimate tr = bfb::estimate_trace_constant(mesh, cfg.audit_cert_samples);
  const bfb::SubstitutionAudit substitution =
      bfb::audit_substituted_identity(mesh, cfg.physics, holdall_area);
  const bfb::StateSolution robin = bfb::solve_robin(mesh, cfg.physics, cfg.solver_tol);
  const bfb::FlawedBoundWitness witness = bfb::flawed_bound_probe(
      mesh, robin, holdall_area, cfg.audit_s_max, cfg.audit_s_grid_points);
  const bfb::AuditReport chain =
      bfb::audit_consistent_chain(mesh, cfg.physics, holdall_area, pf, tr);

  bfb::Manifest manifest(args.out_dir, "audit");
  json report = {{"command", "audit"},
                 {"pf", bfb::to_json(pf)},
                 {"trace", bfb::to_json(tr)},
                 {"substitution_identity", bfb::to_json(substitution)},
                 {"flawed_bound_witness", bfb::to_json(witness)},
                 {"chain", bfb::to_json(chain)}};
  manifest.emit("report.json", report.dump(2) + "\n");
  manifest.emit("chain_links.csv", bfb::chain_links_csv(chain));
  manifest.write();

  char line[200];
  std::snprintf(line, sizeof line,
                "audit: C_pf=%.6g C_tr=%.6g C=%.6g ||u_R||=%.6g min_slack=%.3g",
                pf.c_pf, tr.c_tr, chain.bound_u, chain.u_h1, chain.min_required_slack);
  say(args, line);
  if (!chain.all_required_hold) {
    say(args, "audit: corrected chain violated");
    return kExitAudit;
  }
  return kExitOk;
}

int run_pf(const CliArgs& args, const RunConfig& cfg) {
  const bfb::Mesh mesh = bfb::generate_mesh(cfg.domain, cfg.mesh.n_r, cfg.mesh.n_theta);
  const bfb::PfEstimate pf = bfb::estimate_pf_constant(mesh, cfg.audit_cert_samples);
  const bfb::TraceEstimate tr = bfb::estimate_trace_constant(mesh, cfg.audit_cert_samples);

  bfb::Manifest manifest(args.out_dir, "pf");
  json report = {{"command", "pf"}, {"pf", bfb::to_json(pf)}, {"trace", bfb::to_json(tr)}};
  manifest.emit("report.json", report.dump(2) + "\n");
  manifest.write();
  char line[120];
  std::snprintf(line, sizeof line, "pf: C_pf=%.9g C_tr=%.9g", pf.c_pf, tr.c_tr);
  say(args, line);
  return kExitOk;
}

int run_convergence(const CliArgs& args, const RunConfig& cfg) {
  // Needs the radial oracle, so the domain must be concentric.
  for (std::size_t k = 1; k < cfg.domain.fourier.size(); ++k) {
    if (cfg.domain.fourier[k].cos_k != 0.0 || cfg.domain.fourier[k].sin_k != 0.0) {
      throw bfb::Error("config: the convergence study requires a concentric domain");
    }
  }
  const double a = cfg.domain.inner_radius;
  const double R = cfg.domain.fourier[0].cos_k;
  const double g = cfg.physics.boundary_flux();
  const bfb::RadialSolution oracle_n = bfb::radial_oracle_neumann(a, R, g);
  const bfb::RadialSolution oracle_r = bfb::radial_oracle_robin(a, R, g, cfg.physics.beta);

  json rows = json::array();
  std::string csv = "n,h,l2_neumann,h1_neumann,l2_robin,h1_robin\n";
  bfb::SvgSeries l2n, h1n, l2r, h1r;
  std::vector<double> l2n_vals, h1n_vals, l2r_vals, h1r_vals;
  for (int n : cfg.convergence_n) {
    const bfb::Mesh mesh = bfb::generate_mesh(cfg.domain, n, 4 * n);
    const bfb::Forms forms = bfb::Forms::assemble(mesh);
    const bfb::StateSolution sn =
        bfb::solve_neumann(mesh, forms, cfg.physics, cfg.solver_tol, cfg.solver_max_iters);
    const bfb::StateSolution sr =
        bfb::solve_robin(mesh, forms, cfg.physics, cfg.solver_tol, cfg.solver_max_iters);
    const bfb::OracleError en = bfb::compare_to_radial(mesh, sn.u, oracle_n);
    const bfb::OracleError er = bfb::compare_to_radial(mesh, sr.u, oracle_r);
    const double h = (R - a) / n;
    rows.push_back({{"n", n},
                    {"h", h},
                    {"l2_neumann", en.l2},
                    {"h1_neumann", en.h1_semi},
                    {"l2_robin", er.l2},
                    {"h1_robin", er.h1_semi}});
    char buf[200];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", n, h, en.l2,
                  en.h1_semi, er.l2, er.h1_semi);
    csv += buf;
    l2n.x.push_back(h); l2n.y.push_back(en.l2); l2n_vals.push_back(en.l2);
    h1n.x.push_back(h); h1n.y.push_back(en.h1_semi); h1n_vals.push_back(en.h1_semi);
    l2r.x.push_back(h); l2r.y.push_back(er.l2); l2r_vals.push_back(er.l2);
    h1r.x.push_back(h); h1r.y.push_back(er.h1_semi); h1r_vals.push_back(er.h1_semi);
  }

  auto ratios = [](const std::vector<double>& vals) {
    json out = json::array();
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
      out.push_back(vals[i] / vals[i + 1]);
    }
    return out;
  };
  json report = {{"command", "convergence"},
                 {"rows", rows},
                 {"ratios",
                  {{"l2_neumann", ratios(l2n_vals)},
                   {"h1_neumann", ratios(h1n_vals)},
                   {"l2_robin", ratios(l2r_vals)},
                   {"h1_robin", ratios(h1r_vals)}}}};

  l2n.label = "L2 Neumann"; l2n.color = "#1f77b4";
  h1n.label = "H1 Neumann"; h1n.color = "#ff7f0e";
  l2r.label = "L2 Robin"; l2r.color = "#2ca02c"; l2r.dashed = true;
  h1r.label = "H1 Robin"; h1r.color = "#d62728"; h1r.dashed = true;

  bfb::Manifest manifest(args.out_dir, "convergence");
  manifest.emit("report.json", report.dump(2) + "\n");
  manifest.emit("convergence.csv", csv);
  manifest.emit("convergence.svg",
                bfb::svg_line_chart({l2n, h1n, l2r, h1r}, "Error against the radial oracle",
                                    "h", "error", true, true));
  manifest.write();
  say(args, "convergence: " + std::to_string(cfg.convergence_n.size()) + " resolutions");
  return kExitOk;
}

int run_survey(const CliArgs& args, const RunConfig& cfg) {
  const std::vector<bfb::DomainSpec> family = bfb::survey_family(cfg);
  const bfb::SurveyResult result =
      bfb::uniform_bound_survey(family, cfg.physics, cfg.mesh, cfg.audit_cert_samples);

  bfb::Manifest manifest(args.out_dir, "survey");
  json report = {{"command", "survey"},
                 {"family_size", family.size()},
                 {"survey", bfb::to_json(result)}};
  manifest.emit("report.json", report.dump(2) + "\n");
  manifest.emit("survey.csv", bfb::survey_csv(result));
  manifest.write();

  char line[160];
  std::snprintf(line, sizeof line, "survey: %d domains, max ||u_R|| = %.6g, max C = %.6g",
                static_cast<int>(result.rows.size()), result.max_norm, result.max_c);
  say(args, line);
  if (!result.uniform_bound_holds) {
    say(args, "survey: uniform bound violated");
    return kExitAudit;
  }
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exterior Bernoulli free boundary: solve, optimize, audit"};
  app.require_subcommand(1);

  CliArgs args;
  for (const char* name : {"solve", "optimize", "audit", "pf", "convergence", "survey"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", args.config_path, "JSON config path")->required();
    sub->add_option("--out", args.out_dir, "output directory (overrides config)");
    sub->add_flag("--quiet", args.quiet, "suppress progress output");
    sub->callback([&args, name] { args.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  RunConfig cfg;
  try {
    cfg = bfb::load_run_config(args.config_path);
    // Commands that mesh the configured domain need it admissible up front.
    if (args.command != "survey") {
      const auto violations = bfb::validate_admissible(cfg.domain, cfg.admissibility);
      if (!violations.empty()) {
        std::string msg = "config: domain is not admissible:";
        for (const auto& v : violations) {
          msg += " [" + v.kind + ": " + v.detail + "]";
        }
        throw bfb::Error(msg);
      }
    }
  } catch (const bfb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (args.out_dir.empty()) {
    args.out_dir = cfg.output_dir;
  }

  try {
    if (args.command == "solve") return run_solve(args, cfg);
    if (args.command == "optimize") return run_optimize(args, cfg);
    if (args.command == "audit") return run_audit(args, cfg);
    if (args.command == "pf") return run_pf(args, cfg);
    if (args.command == "convergence") return run_convergence(args, cfg);
    if (args.command == "survey") return run_survey(args, cfg);
    std::cerr << "error: unknown command\n";
    return kExitConfig;
  } catch (const bfb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    // Geometry/config-shaped errors after parse are still solver failures
    // from the CLI's point of view, except explicit config complaints.
    const std::string what = e.what();
    return what.rfind("config:", 0) == 0 ? kExitConfig : kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}
