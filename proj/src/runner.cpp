#include "vb/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include "vb/io.hpp"
#include "vb/msi.hpp"
#include "vb/reconstruction.hpp"
#include "vb/solver.hpp"
#include "vb/stochastic.hpp"

namespace vb {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
}

void check_keys(const json& j, const std::string& where,
                const std::vector<std::string>& required,
                const std::vector<std::string>& optional) {
  expect_object(j, where);
  for (const auto& k : required)
    if (!j.contains(k)) throw ConfigError(where + ": missing key \"" + k + "\"");
  for (const auto& [k, v] : j.items()) {
    if (std::find(required.begin(), required.end(), k) == required.end() &&
        std::find(optional.begin(), optional.end(), k) == optional.end())
      throw ConfigError(where + ": unknown key \"" + k + "\"");
  }
}

double get_num(const json& j, const std::string& where, const std::string& key) {
  if (!j.at(key).is_number())
    throw ConfigError(where + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& where, const std::string& key) {
  if (!j.at(key).is_number_integer())
    throw ConfigError(where + "." + key + ": expected an integer");
  return j.at(key).get<int>();
}

std::string get_str(const json& j, const std::string& where, const std::string& key) {
  if (!j.at(key).is_string())
    throw ConfigError(where + "." + key + ": expected a string");
  return j.at(key).get<std::string>();
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  check_keys(j, "config", {"equation", "grid", "time", "scheme", "initial"},
             {"gauge", "noise", "output"});
  RunConfig c;

  const json& eq = j.at("equation");
  check_keys(eq, "equation", {"alpha", "beta", "a"}, {});
  c.eq.alpha = get_num(eq, "equation", "alpha");
  c.eq.beta = get_num(eq, "equation", "beta");
  c.eq.a = get_num(eq, "equation", "a");
  try {
    c.eq.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("equation: ") + e.what());
  }

  const json& g = j.at("grid");
  check_keys(g, "grid", {"n", "length"}, {});
  c.n = get_int(g, "grid", "n");
  c.length = get_num(g, "grid", "length");
  if (c.n < 8) throw ConfigError("grid.n: must be >= 8");
  if (!(c.length > 0.0)) throw ConfigError("grid.length: must be > 0");

  const json& t = j.at("time");
  check_keys(t, "time", {"dt", "t_end"}, {"snap_every"});
  c.dt = get_num(t, "time", "dt");
  c.t_end = get_num(t, "time", "t_end");
  if (!(c.dt > 0.0)) throw ConfigError("time.dt: must be > 0");
  if (!(c.t_end > 0.0)) throw ConfigError("time.t_end: must be > 0");
  if (t.contains("snap_every")) {
    c.snap_every = get_int(t, "time", "snap_every");
    if (c.snap_every < 1) throw ConfigError("time.snap_every: must be >= 1");
  }

  c.scheme = get_str(j, "config", "scheme");
  if (c.scheme != "reference" && c.scheme != "box")
    throw ConfigError("scheme: must be \"reference\" or \"box\"");

  const json& init = j.at("initial");
  check_keys(init, "initial", {"name"},
             {"k", "amplitude", "mode", "width", "center", "path"});
  c.initial_name = get_str(init, "initial", "name");
  for (const auto& [k, v] : init.items()) {
    if (k == "name" || k == "path") continue;
    c.initial_params[k] = get_num(init, "initial", k);
  }
  if (c.initial_name == "file") {
    if (!init.contains("path")) throw ConfigError("initial: \"file\" needs \"path\"");
    c.initial_file = get_str(init, "initial", "path");
  } else if (c.initial_name != "kdv_soliton" && c.initial_name != "sine" &&
             c.initial_name != "gaussian") {
    throw ConfigError("initial.name: unknown profile \"" + c.initial_name + "\"");
  }

  if (j.contains("gauge")) {
    check_keys(j.at("gauge"), "gauge", {"mean_u"}, {});
    c.mean_u = get_num(j.at("gauge"), "gauge", "mean_u");
  }

  if (j.contains("noise")) {
    const json& nz = j.at("noise");
    check_keys(nz, "noise", {"xi", "gamma", "seed"}, {});
    c.has_noise = true;
    c.noise_xi = get_str(nz, "noise", "xi");
    if (c.noise_xi != "const")
      throw ConfigError("noise.xi: only \"const\" is available");
    c.noise_gamma = get_num(nz, "noise", "gamma");
    if (!nz.at("seed").is_number_unsigned() && !nz.at("seed").is_number_integer())
      throw ConfigError("noise.seed: expected an integer");
    c.noise_seed = nz.at("seed").get<std::uint64_t>();
  }

  if (j.contains("output")) {
    check_keys(j.at("output"), "output", {"dir"}, {});
    c.out_dir = get_str(j.at("output"), "output", "dir");
  }
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  // accept a manifest written by a previous run
  if (j.is_object() && j.contains("config")) return from_json(j.at("config"));
  return from_json(j);
}

json RunConfig::to_json() const {
  json j;
  j["equation"] = {{"alpha", eq.alpha}, {"beta", eq.beta}, {"a", eq.a}};
  j["grid"] = {{"n", n}, {"length", length}};
  j["time"] = {{"dt", dt}, {"t_end", t_end}, {"snap_every", snap_every}};
  j["scheme"] = scheme;
  json init;
  init["name"] = initial_name;
  for (const auto& [k, v] : initial_params) init[k] = v;
  if (initial_name == "file") init["path"] = initial_file;
  j["initial"] = init;
  j["gauge"] = {{"mean_u", mean_u}};
  if (has_noise)
    j["noise"] = {{"xi", noise_xi}, {"gamma", noise_gamma}, {"seed", noise_seed}};
  j["output"] = {{"dir", out_dir}};
  return j;
}

Field build_initial_velocity(const RunConfig& cfg) {
  const PeriodicGrid grid = cfg.grid();
  auto param = [&](const std::string& key, double fallback) {
    auto it = cfg.initial_params.find(key);
    return it == cfg.initial_params.end() ? fallback : it->second;
  };
  if (cfg.initial_name == "kdv_soliton") {
    if (cfg.eq.a <= 0.0)
      throw ConfigError("initial kdv_soliton: needs equation.a > 0");
    return kdv_soliton_field(grid, param("k", 1.0), cfg.eq.a, 0.0);
  }
  if (cfg.initial_name == "sine") {
    const double amp = param("amplitude", 1.0);
    const double mode = param("mode", 1.0);
    const double w = 2.0 * M_PI * mode / grid.length;
    return Field::sample(grid, [&](double x) { return amp * std::sin(w * x); });
  }
  if (cfg.initial_name == "gaussian") {
    const double amp = param("amplitude", 1.0);
    const double width = param("width", grid.length / 10.0);
    const double center = param("center", grid.length / 2.0);
    return Field::sample(grid, [&](double x) {
      double d = std::fmod(x - center, grid.length);
      if (d > grid.length / 2) d -= grid.length;
      if (d < -grid.length / 2) d += grid.length;
      return amp * std::exp(-0.5 * (d / width) * (d / width));
    });
  }
  Field f = io::read_field_csv(cfg.initial_file);
  if (!(f.grid() == grid))
    throw ConfigError("initial file grid does not match config grid");
  return f;
}

namespace {

fs::path prepare_out_dir(const RunConfig& cfg,
                         const std::optional<std::string>& out_override) {
  fs::path dir = out_override ? *out_override : cfg.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + dir.string());
  return dir;
}

void write_manifest(const fs::path& dir, const RunConfig& cfg) {
  json j;
  j["program"] = "vbott";
  j["format_version"] = 1;
  j["config"] = cfg.to_json();
  std::ofstream out(dir / "run.json");
  out << j.dump(2) << "\n";
}

void write_diag(const fs::path& dir, const std::vector<std::string>& cols,
                const std::vector<std::vector<double>>& rows) {
  io::write_series_csv(dir / "diag.csv", cols, rows);
}

void write_snapshots(const fs::path& dir, const std::vector<Field>& snaps) {
  for (size_t k = 0; k < snaps.size(); ++k)
    io::write_field_csv(dir / ("snap_" + std::to_string(k) + ".csv"), snaps[k]);
}

Field momentum_of(const Field& u, const FamilyParams& p) {
  return p.alpha * u - p.beta * spectral_deriv(u, 2);
}

struct BoxRun {
  Trajectory u_traj;
  SimDiagnostics diag;
};

BoxRun box_simulate(const Field& u0, const RunConfig& cfg) {
  const FamilyParams& p = cfg.eq;
  ClebschState cs = init_from_velocity(u0, p);
  ZStateField z = lift_state(cs, p);
  BoxScheme scheme(cfg.grid(), p);

  BoxRun res;
  auto record = [&](double t) {
    const Field& u = z.comps[1];
    const Field m = momentum_of(u, p);
    res.diag.times.push_back(t);
    res.diag.energy.push_back(energy_h(m, p, cfg.mean_u));
    res.diag.momentum.push_back(quadrature(m));
    res.diag.min_lx.push_back(CircleMap(z.comps[0]).min_deriv());
  };
  auto snapshot = [&](double t) {
    res.u_traj.times.push_back(t);
    res.u_traj.snapshots.push_back(z.comps[1]);
  };

  record(0.0);
  snapshot(0.0);
  const long steps = std::lround(cfg.t_end / cfg.dt);
  for (long k = 0; k < steps; ++k) {
    z = scheme.step(z, cfg.dt);
    const double t = (k + 1) * cfg.dt;
    record(t);
    if ((k + 1) % cfg.snap_every == 0) snapshot(t);
  }
  return res;
}

}  // namespace

RunOutcome run_experiment(const RunConfig& cfg,
                          const std::optional<std::string>& out_override) {
  if (cfg.has_noise)
    throw ConfigError("simulate: config carries a noise block; use simulate-sde");
  const fs::path dir = prepare_out_dir(cfg, out_override);
  const Field u0 = build_initial_velocity(cfg);

  std::vector<std::vector<double>> rows;
  std::vector<Field> snaps;
  if (cfg.scheme == "reference") {
    const Field m0 = momentum_of(u0, cfg.eq);
    const Rk4Result r =
        rk4_simulate(m0, cfg.eq, cfg.dt, cfg.t_end, cfg.mean_u, cfg.snap_every);
    for (size_t i = 0; i < r.diag.times.size(); ++i)
      rows.push_back({r.diag.times[i], r.diag.energy[i], r.diag.momentum[i]});
    for (const Field& m : r.traj.snapshots)
      snaps.push_back(velocity_of(m, cfg.eq, cfg.mean_u));
  } else {
    const BoxRun r = box_simulate(u0, cfg);
    for (size_t i = 0; i < r.diag.times.size(); ++i)
      rows.push_back({r.diag.times[i], r.diag.energy[i], r.diag.momentum[i],
                      r.diag.min_lx[i]});
    snaps = r.u_traj.snapshots;
  }

  write_manifest(dir, cfg);
  if (cfg.scheme == "reference")
    write_diag(dir, {"t", "energy", "momentum"}, rows);
  else
    write_diag(dir, {"t", "energy", "momentum", "min_lx"}, rows);
  write_snapshots(dir, snaps);
  return {dir / "run.json", dir / "diag.csv", static_cast<int>(snaps.size())};
}

RunOutcome run_sde_experiment(const RunConfig& cfg,
                              const std::optional<std::string>& out_override,
                              const std::optional<std::uint64_t>& seed_override) {
  if (!cfg.has_noise)
    throw ConfigError("simulate-sde: config has no noise block");
  RunConfig c = cfg;
  if (seed_override) c.noise_seed = *seed_override;
  const fs::path dir = prepare_out_dir(c, out_override);
  const Field u0 = build_initial_velocity(c);
  const Field m0 = momentum_of(u0, c.eq);
  const NoiseSpec noise = NoiseSpec::constant(c.grid(), c.noise_gamma);

  const SdeResult r = simulate_sde(m0, c.eq, noise, c.dt, c.t_end, c.noise_seed,
                                   c.mean_u, c.snap_every);
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < r.diag.times.size(); ++i)
    rows.push_back({r.diag.times[i], r.diag.energy[i], r.diag.momentum[i],
                    r.diag.hbar[i]});
  std::vector<Field> snaps;
  for (const Field& m : r.traj.snapshots)
    snaps.push_back(velocity_of(m, c.eq, c.mean_u));

  write_manifest(dir, c);
  write_diag(dir, {"t", "energy", "momentum", "hbar"}, rows);
  write_snapshots(dir, snaps);
  return {dir / "run.json", dir / "diag.csv", static_cast<int>(snaps.size())};
}

RunOutcome run_reconstruction(const RunConfig& cfg,
                              const std::optional<std::string>& out_override) {
  if (cfg.has_noise)
    throw ConfigError("reconstruct: config carries a noise block");
  const long steps = std::lround(cfg.t_end / cfg.dt);
  if (steps % 2 != 0)
    throw ConfigError("reconstruct: t_end / dt must be even (map integration "
                      "consumes velocity snapshots in pairs)");
  const fs::path dir = prepare_out_dir(cfg, out_override);
  const Field u0 = build_initial_velocity(cfg);
  const Field m0 = momentum_of(u0, cfg.eq);

  // every-step snapshots: the map integrators use midpoint samples
  const Rk4Result r = rk4_simulate(m0, cfg.eq, cfg.dt, cfg.t_end, cfg.mean_u, 1);
  Trajectory u_traj;
  u_traj.times = r.traj.times;
  for (const Field& m : r.traj.snapshots)
    u_traj.snapshots.push_back(velocity_of(m, cfg.eq, cfg.mean_u));

  const DiffeoTrajectory psi = forward_map_from_velocity(u_traj);
  const DiffeoTrajectory l =
      advect_inverse_map(CircleMap::identity(cfg.grid()), u_traj);
  const ThetaSeries th = theta_reconstruct(u_traj, l, cfg.eq.a, 0.0);

  std::vector<std::vector<double>> rows;
  std::vector<Field> snaps;
  for (size_t i = 0; i < psi.times.size(); ++i) {
    const double inv_res = compose(l.maps[i], psi.maps[i]).displacement().max_abs();
    rows.push_back({psi.times[i], th.theta[i], th.rate[i], l.maps[i].min_deriv(),
                    inv_res});
    if (i % cfg.snap_every == 0) snaps.push_back(psi.maps[i].displacement());
  }

  write_manifest(dir, cfg);
  write_diag(dir, {"t", "theta", "rate", "min_lx", "inverse_residual"}, rows);
  write_snapshots(dir, snaps);
  return {dir / "run.json", dir / "diag.csv", static_cast<int>(snaps.size())};
}

std::filesystem::path convergence_study(const RunConfig& cfg, int levels,
                                        const std::optional<std::string>& out_override) {
  if (levels < 3) throw ConfigError("converge: levels must be >= 3");
  const fs::path dir = prepare_out_dir(cfg, out_override);
  const bool refine_space = cfg.scheme == "box";
  const bool analytic = cfg.initial_name == "kdv_soliton" && refine_space;

  struct Level {
    double dt;
    int n;
    Field u_final;
  };
  std::vector<Level> runs;
  for (int lev = 0; lev < levels; ++lev) {
    RunConfig c = cfg;
    c.dt = cfg.dt / double(1 << lev);
    if (refine_space) {
      c.n = cfg.n * (1 << lev);
      if (c.n % 2 == 0) c.n += 1;  // box Jacobian needs an odd node count
    }
    const Field u0 = build_initial_velocity(c);
    Field u_final(c.grid());
    if (c.scheme == "reference") {
      const Field m0 = momentum_of(u0, c.eq);
      const long steps = std::lround(c.t_end / c.dt);
      const Rk4Result r = rk4_simulate(m0, c.eq, c.dt, c.t_end, c.mean_u,
                                       static_cast<int>(steps));
      u_final = velocity_of(r.traj.snapshots.back(), c.eq, c.mean_u);
    } else {
      RunConfig cc = c;
      cc.snap_every = static_cast<int>(std::lround(c.t_end / c.dt));
      u_final = box_simulate(u0, cc).u_traj.snapshots.back();
    }
    runs.push_back({c.dt, c.n, std::move(u_final)});
  }

  std::vector<double> errors(levels);
  for (int lev = 0; lev < levels; ++lev) {
    const Field& u = runs[lev].u_final;
    if (analytic) {
      const Field exact = kdv_soliton_field(
          u.grid(), cfg.initial_params.count("k") ? cfg.initial_params.at("k") : 1.0,
          cfg.eq.a, cfg.t_end);
      errors[lev] = (u - exact).max_abs();
    } else {
      // against the finest level, sampled at this level's nodes
      const Field& ref = runs.back().u_final;
      std::vector<double> xs(u.size());
      for (int j = 0; j < u.size(); ++j) xs[j] = u.grid().node(j);
      const auto ref_at = interpolate_many(ref, xs);
      double e = 0.0;
      for (int j = 0; j < u.size(); ++j) e = std::max(e, std::abs(u[j] - ref_at[j]));
      errors[lev] = e;
    }
  }

  std::vector<std::vector<double>> rows;
  const int last = analytic ? levels : levels - 1;  // finest has zero self-error
  for (int lev = 0; lev < last; ++lev) {
    const double order =
        lev == 0 ? std::nan("") : std::log2(errors[lev - 1] / errors[lev]);
    rows.push_back({double(lev), runs[lev].dt, double(runs[lev].n), errors[lev], order});
  }
  write_manifest(dir, cfg);
  io::write_series_csv(dir / "orders.csv", {"level", "dt", "n", "error", "order"}, rows);
  return dir / "orders.csv";
}

}  // namespace vb
