#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "vb/algebra.hpp"
#include "vb/grid.hpp"

namespace vb {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fully resolved run description. Parsed strictly from JSON: unknown keys,
/// wrong types, and invariant violations all raise ConfigError.
struct RunConfig {
  // equation
  FamilyParams eq;
  // grid
  int n = 0;
  double length = 0.0;
  // time
  double dt = 0.0;
  double t_end = 0.0;
  int snap_every = 1;
  // scheme: "reference" (spectral RK4 on the momentum form) or "box"
  std::string scheme = "reference";
  // initial condition: "kdv_soliton" | "sine" | "gaussian" | "file"
  std::string initial_name;
  std::map<std::string, double> initial_params;
  std::string initial_file;
  // gauge
  double mean_u = 0.0;
  // noise (only for the stochastic entry point)
  bool has_noise = false;
  std::string noise_xi = "const";
  double noise_gamma = 0.0;
  std::uint64_t noise_seed = 0;
  // output
  std::string out_dir = "out";

  static RunConfig from_json(const nlohmann::json& j);
  /// Reads a config file; a manifest written by a previous run (with a
  /// top-level "config" object) is accepted and unwrapped.
  static RunConfig load(const std::filesystem::path& path);

  nlohmann::json to_json() const;

  PeriodicGrid grid() const { return {n, length}; }
};

/// Initial velocity profile selected by the config.
Field build_initial_velocity(const RunConfig& cfg);

struct RunOutcome {
  std::filesystem::path run_json;
  std::filesystem::path diag_csv;
  int snapshots = 0;
};

/// Deterministic run: writes run.json, diag.csv, snap_<k>.csv into
/// cfg.out_dir (or out_override). Rejects configs carrying a noise block.
RunOutcome run_experiment(const RunConfig& cfg,
                          const std::optional<std::string>& out_override = {});

/// Stochastic run (requires a noise block); seed_override replaces the
/// configured path seed when present.
RunOutcome run_sde_experiment(const RunConfig& cfg,
                              const std::optional<std::string>& out_override = {},
                              const std::optional<std::uint64_t>& seed_override = {});

/// Simulate, rebuild the configuration map and the angle, and write the
/// reconstruction series plus map snapshots.
RunOutcome run_reconstruction(const RunConfig& cfg,
                              const std::optional<std::string>& out_override = {});

/// Simultaneous (dt, dx) refinement for "box", dt-only for "reference";
/// errors against the analytic soliton (or the finest level when the
/// initial condition has no closed form). Writes orders.csv.
std::filesystem::path convergence_study(const RunConfig& cfg, int levels,
                                        const std::optional<std::string>& out_override = {});

}  // namespace vb
