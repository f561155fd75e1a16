#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "bfb/error.hpp"
#include "bfb/run_config.hpp"

namespace fs = std::filesystem;

namespace {

std::string g_bfb_path;

int run_cli(const std::string& args) {
  const int status = std::system((g_bfb_path + " " + args + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bfb_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

} // namespace

TEST_CASE("config parsing: defaults and validation") {
  const bfb::RunConfig cfg = bfb::parse_run_config("{}");
  CHECK(cfg.domain.inner_radius == 1.0);
  CHECK(cfg.domain.fourier.size() == 1);
  CHECK(cfg.physics.flux_sign == -1);
  CHECK(cfg.mesh.n_r == 16);
  CHECK(cfg.mesh.n_theta == 64);
  CHECK(cfg.output_dir == "out");

  const bfb::RunConfig custom = bfb::parse_run_config(R"({
    "domain": {"a": 1.0, "fourier": [[2.5, 0.0], [0.1, -0.05]], "holdall_radius": 6.0},
    "physics": {"lambda": 0.5, "beta": 2.0, "flux_sign": 1},
    "mesh": {"n_r": 4, "n_theta": 16}
  })");
  CHECK(custom.domain.fourier[1].sin_k == -0.05);
  CHECK(custom.physics.beta == 2.0);
  CHECK(custom.mesh.n_theta == 16);
}

TEST_CASE("config parsing: rejections") {
  CHECK_THROWS_AS(bfb::parse_run_config("not json"), bfb::Error);
  CHECK_THROWS_AS(bfb::parse_run_config(R"({"unknown_section": {}})"), bfb::Error);
  CHECK_THROWS_AS(bfb::parse_run_config(R"({"physics": {"gamma": 1.0}})"), bfb::Error);
  CHECK_THROWS_AS(bfb::parse_run_config(R"({"physics": {"beta": -1.0}})"), bfb::Error);
  CHECK_THROWS_AS(bfb::parse_run_config(R"({"mesh": {"n_r": 0}})"), bfb::Error);
  CHECK_THROWS_AS(bfb::parse_run_config(R"({"domain": {"fourier": []}})"), bfb::Error);
  CHECK_THROWS_AS(bfb::parse_run_config(R"({"optimizer": {"method": "newton"}})"),
                  bfb::Error);
  CHECK_THROWS_AS(bfb::parse_run_config(R"({"survey": {"kind": "spiral"}})"), bfb::Error);
}

TEST_CASE("survey family is deterministic and admissible") {
  const bfb::RunConfig cfg = bfb::parse_run_config(R"({"survey": {"count": 12, "seed": 7}})");
  const auto family1 = bfb::survey_family(cfg);
  const auto family2 = bfb::survey_family(cfg);
  REQUIRE(family1.size() == 12);
  for (std::size_t i = 0; i < family1.size(); ++i) {
    CHECK(bfb::is_admissible(family1[i], cfg.admissibility));
    CHECK(bfb::domain_distance(family1[i], family2[i]) == 0.0);
  }

  const bfb::RunConfig radii = bfb::parse_run_config(
      R"({"survey": {"kind": "radii", "radii": [1.5, 2.0, 3.0]}})");
  const auto family3 = bfb::survey_family(radii);
  REQUIRE(family3.size() == 3);
  CHECK(family3[2].fourier[0].cos_k == 3.0);
}

TEST_CASE("cli: malformed config exits 2 and writes nothing") {
  const fs::path dir = fresh_dir("bad_config");
  const fs::path cfg = dir / "bad.json";
  write(cfg, R"({"physics": {"beta": -1.0}})");
  const fs::path out = dir / "out";
  CHECK(run_cli("solve --config " + cfg.string() + " --out " + out.string()) == 2);
  CHECK_FALSE(fs::exists(out));

  // unreadable config path
  CHECK(run_cli("solve --config " + (dir / "missing.json").string()) == 2);
  // inadmissible domain
  const fs::path degenerate = dir / "degenerate.json";
  write(degenerate, R"({"domain": {"fourier": [[1.05, 0.0]]}})");
  CHECK(run_cli("solve --config " + degenerate.string() + " --out " + out.string()) == 2);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("cli: solver failure exits 3") {
  const fs::path dir = fresh_dir("solver_fail");
  const fs::path cfg = dir / "cfg.json";
  // a one-iteration cap cannot converge on a real mesh
  write(cfg, R"({"mesh": {"n_r": 6, "n_theta": 32}, "solver": {"max_iters": 1}})");
  const fs::path out = dir / "out";
  CHECK(run_cli("solve --config " + cfg.string() + " --out " + out.string()) == 3);
  CHECK_FALSE(fs::exists(out / "report.json"));
}

TEST_CASE("cli: solve writes the manifest-covered artifact set") {
  const fs::path dir = fresh_dir("solve");
  const fs::path cfg = dir / "cfg.json";
  write(cfg, R"({"mesh": {"n_r": 4, "n_theta": 16}})");
  const fs::path out = dir / "out";
  REQUIRE(run_cli("solve --config " + cfg.string() + " --out " + out.string() + " --quiet") == 0);

  for (const char* name : {"report.json", "u_neumann.csv", "u_robin.csv", "mesh.txt",
                           "manifest.json"}) {
    CHECK(fs::exists(out / name));
  }
  const std::string manifest = slurp(out / "manifest.json");
  for (const char* name : {"report.json", "u_neumann.csv", "u_robin.csv", "mesh.txt"}) {
    CHECK(manifest.find(name) != std::string::npos);
  }
  // no stray temp files
  for (const auto& entry : fs::directory_iterator(out)) {
    CHECK(entry.path().extension() != ".tmp");
  }
}

TEST_CASE("cli: solve matches the analytic energy gap on the baseline") {
  const fs::path dir = fresh_dir("solve_oracle");
  const fs::path cfg = dir / "cfg.json";
  write(cfg, R"({"mesh": {"n_r": 16, "n_theta": 64}})");
  const fs::path out = dir / "out";
  REQUIRE(run_cli("solve --config " + cfg.string() + " --out " + out.string() + " --quiet") == 0);

  const nlohmann::json report = nlohmann::json::parse(slurp(out / "report.json"));
  // radial limit 2 pi ln2 (c_N - c_R)^2 for a=1, R=2, lambda=1/e, beta=1
  const double j = report["cost"]["j"].get<double>();
  CHECK(std::abs(j - 0.7345622473043275) < 2e-3);
  CHECK(report["cost"]["physics"]["flux_sign"].get<int>() == -1);
}

TEST_CASE("cli: convergence rejects a non-concentric domain") {
  const fs::path dir = fresh_dir("conv_reject");
  const fs::path cfg = dir / "cfg.json";
  write(cfg, R"({"domain": {"fourier": [[2.0, 0.0], [0.1, 0.0]]}})");
  const fs::path out = dir / "out";
  CHECK(run_cli("convergence --config " + cfg.string() + " --out " + out.string()) == 2);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("cli: identical configs give byte-identical reports") {
  const fs::path dir = fresh_dir("determinism");
  const fs::path cfg = dir / "cfg.json";
  write(cfg, R"({"mesh": {"n_r": 4, "n_theta": 16}, "audit": {"cert_samples": 50}})");

  for (const std::string command : {"solve", "pf"}) {
    const fs::path out1 = dir / (command + "_1");
    const fs::path out2 = dir / (command + "_2");
    REQUIRE(run_cli(command + " --config " + cfg.string() + " --out " + out1.string() +
                    " --quiet") == 0);
    REQUIRE(run_cli(command + " --config " + cfg.string() + " --out " + out2.string() +
                    " --quiet") == 0);
    CHECK(slurp(out1 / "report.json") == slurp(out2 / "report.json"));
    CHECK(!slurp(out1 / "report.json").empty());
  }
}

TEST_CASE("cli: audit exits 0 on the baseline and emits link rows") {
  const fs::path dir = fresh_dir("audit");
  const fs::path cfg = dir / "cfg.json";
  write(cfg, R"({"mesh": {"n_r": 4, "n_theta": 24}, "audit": {"cert_samples": 50}})");
  const fs::path out = dir / "out";
  REQUIRE(run_cli("audit --config " + cfg.string() + " --out " + out.string() + " --quiet") == 0);
  const std::string links = slurp(out / "chain_links.csv");
  CHECK(links.find("poincare_friedrichs") != std::string::npos);
  CHECK(links.find("final_bound_u") != std::string::npos);

  const nlohmann::json report = nlohmann::json::parse(slurp(out / "report.json"));
  CHECK(report["chain"]["all_required_hold"].get<bool>());
  CHECK(report["chain"]["min_required_slack"].get<double>() >= -1e-10);
  CHECK(report["flawed_bound_witness"]["found"].get<bool>());
  // the substituted-identity residual equals the reaction flux on both
  // flux-sign branches
  for (const char* branch : {"positive_flux", "negative_flux"}) {
    const auto& terms = report["substitution_identity"][branch];
    const double residual = terms["identity_residual"].get<double>();
    const double reaction = terms["gamma_flux_reaction"].get<double>();
    CHECK(std::abs(residual - reaction) <= 1e-6 * std::abs(residual));
  }
}

int main(int argc, char** argv) {
  if (argc > 1) {
    g_bfb_path = argv[argc - 1];
  }
  doctest::Context context;
  context.applyCommandLine(argc - (argc > 1 ? 1 : 0), argv);
  return context.run();
}
