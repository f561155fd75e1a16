#include "bfb/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bfb/error.hpp"
#include "bfb/random.hpp"

namespace bfb {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& section,
                  const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw Error("config: unknown key \"" + key + "\" in " + section);
    }
  }
}

double get_number(const json& obj, const std::string& section, const std::string& key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) {
    throw Error("config: " + section + "." + key + " must be a number");
  }
  return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& section, const std::string& key,
            int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) {
    throw Error("config: " + section + "." + key + " must be an integer");
  }
  return obj[key].get<int>();
}

std::string get_string(const json& obj, const std::string& section, const std::string& key,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) {
    throw Error("config: " + section + "." + key + " must be a string");
  }
  return obj[key].get<std::string>();
}

} // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) {
    throw Error("config: top level must be an object");
  }
  require_keys(root, "top level",
               {"domain", "physics", "mesh", "admissibility", "solver", "optimizer",
                "audit", "survey", "convergence", "output_dir"});

  RunConfig cfg;

  {
    const json dom = root.value("domain", json::object());
    require_keys(dom, "domain", {"a", "fourier", "holdall_radius"});
    const double a = get_number(dom, "domain", "a", 1.0);
    const double ru = get_number(dom, "domain", "holdall_radius", 5.0);
    std::vector<FourierCoeff> fourier = {{2.0, 0.0}};
    if (dom.contains("fourier")) {
      if (!dom["fourier"].is_array() || dom["fourier"].empty()) {
        throw Error("config: domain.fourier must be a non-empty array of [cos, sin] pairs");
      }
      fourier.clear();
      for (const auto& pair : dom["fourier"]) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
            !pair[1].is_number()) {
          throw Error("config: domain.fourier entries must be [cos, sin] number pairs");
        }
        fourier.push_back({pair[0].get<double>(), pair[1].get<double>()});
      }
    }
    cfg.domain = build_domain(a, std::move(fourier), ru);
  }

  {
    const json phys = root.value("physics", json::object());
    require_keys(phys, "physics", {"lambda", "beta", "flux_sign"});
    cfg.physics.lambda = get_number(phys, "physics", "lambda", cfg.physics.lambda);
    cfg.physics.beta = get_number(phys, "physics", "beta", cfg.physics.beta);
    cfg.physics.flux_sign = get_int(phys, "physics", "flux_sign", cfg.physics.flux_sign);
    cfg.physics.validate();
  }

  {
    const json mesh = root.value("mesh", json::object());
    require_keys(mesh, "mesh", {"n_r", "n_theta"});
    cfg.mesh.n_r = get_int(mesh, "mesh", "n_r", cfg.mesh.n_r);
    cfg.mesh.n_theta = get_int(mesh, "mesh", "n_theta", cfg.mesh.n_theta);
    if (cfg.mesh.n_r < 1 || cfg.mesh.n_theta < 8) {
      throw Error("config: mesh requires n_r >= 1 and n_theta >= 8");
    }
  }

  {
    const json adm = root.value("admissibility", json::object());
    require_keys(adm, "admissibility", {"delta_gap", "max_fourier_norm", "max_perimeter"});
    cfg.admissibility.delta_gap =
        get_number(adm, "admissibility", "delta_gap", cfg.admissibility.delta_gap);
    cfg.admissibility.max_fourier_norm = get_number(adm, "admissibility", "max_fourier_norm",
                                                    cfg.admissibility.max_fourier_norm);
    cfg.admissibility.max_perimeter =
        get_number(adm, "admissibility", "max_perimeter", cfg.admissibility.max_perimeter);
    if (!(cfg.admissibility.delta_gap > 0.0) || !(cfg.admissibility.max_fourier_norm > 0.0) ||
        !(cfg.admissibility.max_perimeter > 0.0)) {
      throw Error("config: admissibility limits must be strictly positive");
    }
  }

  {
    const json sol = root.value("solver", json::object());
    require_keys(sol, "solver", {"tol", "max_iters"});
    cfg.solver_tol = get_number(sol, "solver", "tol", cfg.solver_tol);
    cfg.solver_max_iters = get_int(sol, "solver", "max_iters", cfg.solver_max_iters);
    if (!(cfg.solver_tol > 0.0) || cfg.solver_max_iters < 0) {
      throw Error("config: solver.tol must be positive and max_iters non-negative");
    }
  }

  {
    const json opt = root.value("optimizer", json::object());
    require_keys(opt, "optimizer",
                 {"method", "initial_step", "shrink", "armijo", "min_step", "j_tol",
                  "grad_tol", "max_iters", "fd_step"});
    const std::string method =
        get_string(opt, "optimizer", "method", "fd-gradient-descent");
    if (method == "fd-gradient-descent") {
      cfg.optimizer.method = OptimMethod::FdGradientDescent;
    } else if (method == "nelder-mead") {
      cfg.optimizer.method = OptimMethod::NelderMead;
    } else {
      throw Error("config: optimizer.method must be fd-gradient-descent or nelder-mead");
    }
    cfg.optimizer.initial_step =
        get_number(opt, "optimizer", "initial_step", cfg.optimizer.initial_step);
    cfg.optimizer.shrink = get_number(opt, "optimizer", "shrink", cfg.optimizer.shrink);
    cfg.optimizer.armijo = get_number(opt, "optimizer", "armijo", cfg.optimizer.armijo);
    cfg.optimizer.min_step = get_number(opt, "optimizer", "min_step", cfg.optimizer.min_step);
    cfg.optimizer.j_tol = get_number(opt, "optimizer", "j_tol", cfg.optimizer.j_tol);
    cfg.optimizer.grad_tol = get_number(opt, "optimizer", "grad_tol", cfg.optimizer.grad_tol);
    cfg.optimizer.max_iters = get_int(opt, "optimizer", "max_iters", cfg.optimizer.max_iters);
    cfg.optimizer.fd_step = get_number(opt, "optimizer", "fd_step", cfg.optimizer.fd_step);
    cfg.optimizer.resolution = cfg.mesh;
    cfg.optimizer.validate();
  }

  {
    const json aud = root.value("audit", json::object());
    require_keys(aud, "audit", {"s_max", "s_grid_points", "cert_samples"});
    cfg.audit_s_max = get_number(aud, "audit", "s_max", cfg.audit_s_max);
    cfg.audit_s_grid_points = get_int(aud, "audit", "s_grid_points", cfg.audit_s_grid_points);
    cfg.audit_cert_samples = get_int(aud, "audit", "cert_samples", cfg.audit_cert_samples);
    if (!(cfg.audit_s_max >= 1.0) || cfg.audit_s_grid_points < 2 ||
        cfg.audit_cert_samples < 1) {
      throw Error("config: audit requires s_max >= 1, s_grid_points >= 2, cert_samples >= 1");
    }
  }

  {
    const json sur = root.value("survey", json::object());
    require_keys(sur, "survey", {"kind", "radii", "count", "max_k", "amplitude", "seed"});
    cfg.survey_kind = get_string(sur, "survey", "kind", cfg.survey_kind);
    if (cfg.survey_kind != "fourier" && cfg.survey_kind != "radii") {
      throw Error("config: survey.kind must be \"fourier\" or \"radii\"");
    }
    if (sur.contains("radii")) {
      if (!sur["radii"].is_array() || sur["radii"].empty()) {
        throw Error("config: survey.radii must be a non-empty number array");
      }
      cfg.survey_radii.clear();
      for (const auto& r : sur["radii"]) {
        if (!r.is_number()) {
          throw Error("config: survey.radii must be a non-empty number array");
        }
        cfg.survey_radii.push_back(r.get<double>());
      }
    }
    cfg.survey_count = get_int(sur, "survey", "count", cfg.survey_count);
    cfg.survey_max_k = get_int(sur, "survey", "max_k", cfg.survey_max_k);
    cfg.survey_amplitude = get_number(sur, "survey", "amplitude", cfg.survey_amplitude);
    if (sur.contains("seed")) {
      if (!sur["seed"].is_number_integer()) {
        throw Error("config: survey.seed must be an integer");
      }
      cfg.survey_seed = sur["seed"].get<unsigned long long>();
    }
    if (cfg.survey_count < 1 || cfg.survey_max_k < 0 || !(cfg.survey_amplitude >= 0.0)) {
      throw Error("config: survey requires count >= 1, max_k >= 0, amplitude >= 0");
    }
  }

  {
    const json conv = root.value("convergence", json::object());
    require_keys(conv, "convergence", {"n_values"});
    if (conv.contains("n_values")) {
      if (!conv["n_values"].is_array() || conv["n_values"].size() < 2) {
        throw Error("config: convergence.n_values must list at least two resolutions");
      }
      cfg.convergence_n.clear();
      for (const auto& n : conv["n_values"]) {
        if (!n.is_number_integer() || n.get<int>() < 1) {
          throw Error("config: convergence.n_values must be positive integers");
        }
        cfg.convergence_n.push_back(n.get<int>());
      }
    }
  }

  if (root.contains("output_dir")) {
    if (!root["output_dir"].is_string()) {
      throw Error("config: output_dir must be a string");
    }
    cfg.output_dir = root["output_dir"].get<std::string>();
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("config: cannot read " + path);
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

std::vector<DomainSpec> survey_family(const RunConfig& cfg) {
  std::vector<DomainSpec> family;
  if (cfg.survey_kind == "radii") {
    for (double r : cfg.survey_radii) {
      family.push_back(build_domain(cfg.domain.inner_radius, {{r, 0.0}},
                                    cfg.domain.holdall_radius));
    }
    return family;
  }

  // Fourier perturbations around the configured mean radius, rejection
  // sampled until admissible so every family member is valid.
  std::mt19937_64 gen(cfg.survey_seed);
  const double mean_radius = cfg.domain.fourier[0].cos_k;
  int guard = 0;
  while (static_cast<int>(family.size()) < cfg.survey_count) {
    if (++guard > 100 * cfg.survey_count) {
      throw Error("survey: could not sample enough admissible domains; relax the limits");
    }
    std::vector<FourierCoeff> coeffs = {{mean_radius, 0.0}};
    for (int k = 1; k <= cfg.survey_max_k; ++k) {
      coeffs.push_back({uniform(gen, -cfg.survey_amplitude, cfg.survey_amplitude),
                        uniform(gen, -cfg.survey_amplitude, cfg.survey_amplitude)});
    }
    DomainSpec spec =
        build_domain(cfg.domain.inner_radius, std::move(coeffs), cfg.domain.holdall_radius);
    if (is_admissible(spec, cfg.admissibility)) {
      family.push_back(std::move(spec));
    }
  }
  return family;
}

} // namespace bfb
