#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "vb/runner.hpp"
#include "vb/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailure = 1;
constexpr int kConfigError = 2;
constexpr int kRuntimeAbort = 3;

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool need_config = true) {
  auto* c = cmd->add_option("--config", o.config_path, "JSON run configuration");
  if (need_config) c->required();
  cmd->add_option("--seed", [&o](const CLI::results_t& r) {
    o.seed = std::stoull(r.at(0));
    return true;
  }, "Override the noise path seed");
  cmd->add_option("--out", [&o](const CLI::results_t& r) {
    o.out_dir = r.at(0);
    return true;
  }, "Override the output directory");
}

int run_verify(const std::string& filter, double tol_scale,
               const std::optional<std::string>& out_dir) {
  const vb::VerifyReport report = vb::verify_suite(filter, tol_scale);
  nlohmann::json j;
  j["properties"] = nlohmann::json::array();
  for (const auto& r : report.results) {
    std::printf("%-28s %-12s residual %.3e  tol %.3e  %s\n", r.name.c_str(),
                r.tag.c_str(), r.residual, r.tolerance, r.passed ? "pass" : "FAIL");
    j["properties"].push_back({{"name", r.name},
                               {"tag", r.tag},
                               {"residual", r.residual},
                               {"tolerance", r.tolerance},
                               {"passed", r.passed}});
  }
  j["all_passed"] = report.all_passed();
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    std::ofstream f(std::filesystem::path(*out_dir) / "verify.json");
    f << j.dump(2) << "\n";
  }
  if (report.results.empty()) {
    std::fprintf(stderr, "verify: no property matches the filter\n");
    return kConfigError;
  }
  return report.all_passed() ? kOk : kVerifyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic KdV/CH family: simulation, reconstruction, verification"};
  app.require_subcommand(1);

  CommonOpts sim_o, sde_o, rec_o, conv_o;
  std::string filter;
  double tol_scale = 1.0;
  std::optional<std::string> verify_out;
  int levels = 4;

  auto* sim = app.add_subcommand("simulate", "Deterministic run (reference or box)");
  add_common(sim, sim_o);
  auto* sde = app.add_subcommand("simulate-sde", "Stochastic run (Heun, transport noise)");
  add_common(sde, sde_o);
  auto* rec = app.add_subcommand("reconstruct", "Simulate and rebuild (psi, theta)");
  add_common(rec, rec_o);
  auto* conv = app.add_subcommand("converge", "Refinement study against an oracle");
  add_common(conv, conv_o);
  conv->add_option("--levels", levels, "Number of refinement levels (>= 3)");
  auto* ver = app.add_subcommand("verify", "Run the numerical identity suite");
  ver->add_option("--filter", filter, "Only properties whose tag/name contains this");
  ver->add_option("--tol-scale", tol_scale, "Scale all tolerances (diagnostics)")
      ->group("");  // hidden
  ver->add_option("--out", [&verify_out](const CLI::results_t& r) {
    verify_out = r.at(0);
    return true;
  }, "Directory for the JSON report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ver->parsed()) return run_verify(filter, tol_scale, verify_out);
    if (sim->parsed()) {
      vb::run_experiment(vb::RunConfig::load(sim_o.config_path), sim_o.out_dir);
      return kOk;
    }
    if (sde->parsed()) {
      vb::run_sde_experiment(vb::RunConfig::load(sde_o.config_path), sde_o.out_dir,
                             sde_o.seed);
      return kOk;
    }
    if (rec->parsed()) {
      vb::run_reconstruction(vb::RunConfig::load(rec_o.config_path), rec_o.out_dir);
      return kOk;
    }
    if (conv->parsed()) {
      vb::convergence_study(vb::RunConfig::load(conv_o.config_path), levels,
                            conv_o.out_dir);
      return kOk;
    }
  } catch (const vb::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime abort: %s\n", e.what());
    return kRuntimeAbort;
  }
  return kConfigError;
}
