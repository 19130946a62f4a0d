// Acceptance gate: one pass/fail line per criterion, exit 0 only if all pass.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "vb/msi.hpp"
#include "vb/reconstruction.hpp"
#include "vb/runner.hpp"
#include "vb/solver.hpp"
#include "vb/stochastic.hpp"
#include "vb/verify.hpp"

using namespace vb;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void criterion(int id, const std::string& what, bool ok, const std::string& detail) {
  std::printf("[%2d] %-4s %-38s %s\n", id, ok ? "PASS" : "FAIL", what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

const PropertyResult& prop(const VerifyReport& rep, const std::string& name) {
  for (const auto& r : rep.results)
    if (r.name == name) return r;
  throw std::runtime_error("missing property: " + name);
}

// residual re-checked against the pinned bound, independent of suite config
bool pinned(const VerifyReport& rep, const std::string& name, double tol,
            double& out) {
  const PropertyResult& r = prop(rep, name);
  out = r.residual;
  return r.residual <= tol;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  const VerifyReport rep = verify_suite();

  // 1. duality of the coadjoint action against bracket + pairing
  try {
    double r;
    const bool ok = pinned(rep, "algebra-duality", 1e-10, r);
    criterion(1, "coadjoint/bracket duality", ok, fmt(r) + " <= 1e-10");
  } catch (const std::exception& e) {
    criterion(1, "coadjoint/bracket duality", false, e.what());
  }

  // 2. Jacobi identity including the central cocycle slot
  try {
    double r;
    const bool ok = pinned(rep, "algebra-jacobi", 1e-9, r);
    criterion(2, "Jacobi identity with cocycle slot", ok, fmt(r) + " <= 1e-9");
  } catch (const std::exception& e) {
    criterion(2, "Jacobi identity with cocycle slot", false, e.what());
  }

  // 3. elimination identity A + B = 0 on random admissible states
  try {
    double r;
    const bool ok = pinned(rep, "thm2-elimination", 1e-8, r);
    criterion(3, "elimination identity A + B = 0", ok, fmt(r) + " <= 1e-8");
  } catch (const std::exception& e) {
    criterion(3, "elimination identity A + B = 0", false, e.what());
  }

  // 4. 7/4/3-component Hamiltonian-form residual vs Clebsch-system residual
  try {
    double r1, r2, r3;
    const bool ok = pinned(rep, "thm3-full-a-positive", 1e-9, r1) &
                    pinned(rep, "thm3-reduced-ch", 1e-9, r2) &
                    pinned(rep, "thm3-reduced-burgers", 1e-9, r3);
    criterion(4, "phase-form / Clebsch equivalence", ok,
              fmt(std::max({r1, r2, r3})) + " <= 1e-9 (3 regimes)");
  } catch (const std::exception& e) {
    criterion(4, "phase-form / Clebsch equivalence", false, e.what());
  }

  // 5. soliton transport: certified oracle, reference speed, box-scheme order
  try {
    PeriodicGrid g(256, 40.0);
    const FamilyParams p{1.0, 0.0, 1.0};
    // certify on n = 512: the third derivative amplifies the spectral tail of
    // sech^2, so the coarse grid overstates the oracle's true residual
    PeriodicGrid gc(512, 40.0);
    const double cert =
        ep_residual(kdv_soliton_field(gc, 1.0, p.a, 0.25),
                    kdv_soliton_time_deriv(gc, 1.0, p.a, 0.25), p)
            .max_abs();
    const bool cert_ok = cert <= 1e-8;

    const Field m0 = kdv_soliton_field(g, 1.0, p.a, 0.0);
    const Rk4Result r = rk4_simulate(m0, p, 1e-4, 1.0, 0.0, 10000);
    const double speed = peak_location(r.traj.snapshots.back()) / 1.0;
    const bool speed_ok = std::abs(speed - 4.0) <= 1e-3;

    RunConfig cfg;
    cfg.eq = p;
    cfg.n = 64;
    cfg.length = 40.0;
    cfg.dt = 0.01;
    cfg.t_end = 0.05;
    cfg.scheme = "box";
    cfg.initial_name = "kdv_soliton";
    cfg.initial_params["k"] = 1.0;
    const fs::path dir = fs::temp_directory_path() / "vb_acc_converge";
    fs::remove_all(dir);
    const fs::path orders = convergence_study(cfg, 4, dir.string());
    std::ifstream in(orders);
    std::string line;
    std::vector<double> ord;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      const size_t c = line.rfind(',');
      ord.push_back(std::strtod(line.c_str() + c + 1, nullptr));
    }
    const bool box_ok = ord.size() >= 4 && ord[2] >= 1.8 && ord[2] <= 2.2 &&
                        ord[3] >= 1.8 && ord[3] <= 2.2;
    criterion(5, "soliton transport (certified oracle)",
              cert_ok && speed_ok && box_ok,
              "cert " + fmt(cert) + ", |speed-4| " + fmt(std::abs(speed - 4.0)) +
                  ", box orders " + fmt(ord.size() >= 4 ? ord[2] : 0.0) + "/" +
                  fmt(ord.size() >= 4 ? ord[3] : 0.0));
    fs::remove_all(dir);
  } catch (const std::exception& e) {
    criterion(5, "soliton transport (certified oracle)", false, e.what());
  }

  // 6. conservation of the momentum integral and the energy over t = 1
  try {
    double worst_mom = 0.0, worst_en = 0.0;
    {
      PeriodicGrid g(128, 2.0 * M_PI);
      const Field u0 = Field::sample(g, [](double x) { return std::sin(x); });
      const Field m0 = u0 - spectral_deriv(u0, 2);
      const Rk4Result r = rk4_simulate(m0, {1.0, 1.0, 0.0}, 1e-3, 1.0, 0.0, 1000);
      worst_mom = std::max(worst_mom,
                           std::abs(r.diag.momentum.back() - r.diag.momentum.front()));
      worst_en = std::max(worst_en,
                          std::abs(r.diag.energy.back() - r.diag.energy.front()) /
                              std::abs(r.diag.energy.front()));
    }
    {
      PeriodicGrid g(64, 2.0 * M_PI);
      const Field u0 = Field::sample(g, [](double x) { return 0.3 * std::sin(x); });
      const Field m0 = u0 - spectral_deriv(u0, 2);
      const Rk4Result r = rk4_simulate(m0, {1.0, 1.0, 1.0}, 5e-5, 1.0, 0.0, 20000);
      worst_mom = std::max(worst_mom,
                           std::abs(r.diag.momentum.back() - r.diag.momentum.front()));
      worst_en = std::max(worst_en,
                          std::abs(r.diag.energy.back() - r.diag.energy.front()) /
                              std::abs(r.diag.energy.front()));
    }
    const bool ok = worst_mom <= 1e-11 && worst_en <= 1e-8;
    criterion(6, "momentum/energy conservation", ok,
              "mom drift " + fmt(worst_mom) + " <= 1e-11, energy " + fmt(worst_en) +
                  " <= 1e-8");
  } catch (const std::exception& e) {
    criterion(6, "momentum/energy conservation", false, e.what());
  }

  // 7. discrete conservation-law residual of tangent pairs under refinement,
  //    with a frozen (non-variational) control that must stay O(1)
  try {
    const FamilyParams p{1.0, 0.5, 0.5};
    std::vector<double> worsts;
    double control = 0.0, finest = 0.0;
    for (int lev = 0; lev < 3; ++lev) {
      PeriodicGrid g(64 << lev, 2.0 * M_PI);
      const double dt = 2e-4 / (1 << lev);
      const Field u0 = random_band_limited(g, 3, 7, 0.5, true);
      const VariationField v0{random_band_limited(g, 3, 11, 0.1),
                              random_band_limited(g, 3, 12, 0.1),
                              random_band_limited(g, 3, 13, 0.1)};
      const VariationField w0{random_band_limited(g, 3, 21, 0.1),
                              random_band_limited(g, 3, 22, 0.1),
                              random_band_limited(g, 3, 23, 0.1)};
      const ClebschSimResult r = clebsch_simulate_with_variations(
          init_from_velocity(u0, p), v0, w0, p, dt, 0.01, 0.0, 1);
      double worst = 0.0;
      for (const Field& f : symplecticity_residual(r.base, r.V, r.W, p))
        worst = std::max(worst, f.max_abs());
      worsts.push_back(worst);
      if (lev == 2) {
        finest = worst;
        std::vector<VariationField> frozen(r.W.size(), r.W.front());
        for (const Field& f : symplecticity_residual(r.base, r.V, frozen, p))
          control = std::max(control, f.max_abs());
      }
    }
    const double o1 = std::log2(worsts[0] / worsts[1]);
    const double o2 = std::log2(worsts[1] / worsts[2]);
    const bool ok = o1 >= 1.8 && o2 >= 1.8 && control >= 1e-3 &&
                    control >= 1e3 * finest;
    criterion(7, "symplecticity law under refinement", ok,
              "orders " + fmt(o1) + "/" + fmt(o2) + ", control " + fmt(control) +
                  " vs " + fmt(finest));
  } catch (const std::exception& e) {
    criterion(7, "symplecticity law under refinement", false, e.what());
  }

  // 8. central-extension cocycle identities and twisted associativity
  try {
    double r1, r2, r3;
    const bool ok = pinned(rep, "bott-cocycle-endpoints", 1e-10, r1) &
                    pinned(rep, "bott-cocycle-identity", 1e-8, r2) &
                    pinned(rep, "group-associativity", 1e-8, r3);
    criterion(8, "group cocycle identities", ok,
              "endpoints " + fmt(r1) + ", 2-cocycle " + fmt(r2) + ", assoc " +
                  fmt(r3));
  } catch (const std::exception& e) {
    criterion(8, "group cocycle identities", false, e.what());
  }

  // 9. forward/inverse map consistency along a soliton flow + cocycle rate
  try {
    // map consistency at high spatial resolution (error is interpolation-bound)
    PeriodicGrid g(512, 40.0);
    const FamilyParams p{1.0, 0.0, 0.25};
    const Field m0 = kdv_soliton_field(g, 1.0, p.a, 0.0);
    const Rk4Result r = rk4_simulate(m0, p, 1.25e-4, 0.5, 0.0, 1);
    Trajectory u_traj;
    u_traj.times = r.traj.times;
    for (const Field& m : r.traj.snapshots)
      u_traj.snapshots.push_back(velocity_of(m, p));
    const DiffeoTrajectory psi = forward_map_from_velocity(u_traj);
    const DiffeoTrajectory l = advect_inverse_map(CircleMap::identity(g), u_traj);
    const double res =
        compose(l.maps.back(), psi.maps.back()).displacement().max_abs();
    const bool inv_ok = res <= 1e-6;

    // cocycle rate vs centered differences of the cocycle along the flow
    PeriodicGrid g2(256, 40.0);
    const Field m2 = kdv_soliton_field(g2, 1.0, p.a, 0.0);
    const Rk4Result r2 = rk4_simulate(m2, p, 1e-3, 0.2, 0.0, 1);
    Trajectory u2;
    u2.times = r2.traj.times;
    for (const Field& m : r2.traj.snapshots) u2.snapshots.push_back(velocity_of(m, p));
    const DiffeoTrajectory psi2 = forward_map_from_velocity(u2);
    const size_t mid = psi2.times.size() / 2;
    const CircleDiffeo inv_mid = invert(psi2.maps[mid]);
    const double rate = cocycle_rate(u2.snapshots[2 * mid], inv_mid);
    double prev = 0.0, worst_order = 10.0;
    for (int lev = 0; lev < 3; ++lev) {
      const size_t h = 8 >> lev;
      const double ds = h * (psi2.times[1] - psi2.times[0]);
      const double fd = (bott_cocycle(psi2.maps[mid + h], inv_mid) -
                         bott_cocycle(psi2.maps[mid - h], inv_mid)) /
                        (2.0 * ds);
      const double err = std::abs(fd - rate);
      if (lev > 0) worst_order = std::min(worst_order, std::log2(prev / err));
      prev = err;
    }
    criterion(9, "map reconstruction and cocycle rate", inv_ok && worst_order >= 1.8,
              "inverse residual " + fmt(res) + " <= 1e-6, rate order " +
                  fmt(worst_order));
  } catch (const std::exception& e) {
    criterion(9, "map reconstruction and cocycle rate", false, e.what());
  }

  // 10. strong convergence to the shifted deterministic path + drift-form
  //     agreement of the three momentum-equation formulations
  try {
    PeriodicGrid g(256, 40.0);
    const FamilyParams p{1.0, 0.0, 1.0};
    const double gamma = 0.5, T = 0.2;
    const Field m0 = kdv_soliton_field(g, 1.0, p.a, 0.0);
    BrownianPath path = BrownianPath::generate(42, 2e-5, T);
    std::vector<double> errs;
    for (int lev = 0; lev < 4; ++lev) {
      if (lev) path = path.refine();
      const SdeResult r = simulate_sde(m0, p, NoiseSpec::constant(g, gamma), path,
                                       0.0, path.steps());
      const Rk4Result det = rk4_simulate(m0, p, path.dt(), T, 0.0, path.steps());
      const Field ref =
          shift_field(det.traj.snapshots.back(), gamma * path.values().back());
      errs.push_back((r.traj.snapshots.back() - ref).max_abs());
    }
    const double slope = std::log2(errs.front() / errs.back()) / 3.0;
    double r3w;
    const bool three_ok = pinned(rep, "stochastic-three-way", 1e-11, r3w);
    criterion(10, "noise shift test and formulation match",
              slope >= 0.8 && three_ok,
              "strong order " + fmt(slope) + " >= 0.8, three-way " + fmt(r3w) +
                  " <= 1e-11");
  } catch (const std::exception& e) {
    criterion(10, "noise shift test and formulation match", false, e.what());
  }

  // 11. byte-identical diagnostics for identical config + seed
  try {
    nlohmann::json j{
        {"equation", {{"alpha", 1.0}, {"beta", 0.0}, {"a", 1.0}}},
        {"grid", {{"n", 128}, {"length", 40.0}}},
        {"time", {{"dt", 1e-3}, {"t_end", 0.05}, {"snap_every", 10}}},
        {"scheme", "reference"},
        {"initial", {{"name", "kdv_soliton"}, {"k", 1.0}}},
        {"noise", {{"xi", "const"}, {"gamma", 0.5}, {"seed", 42}}}};
    const RunConfig cfg = RunConfig::from_json(j);
    const fs::path d1 = fs::temp_directory_path() / "vb_acc_det1";
    const fs::path d2 = fs::temp_directory_path() / "vb_acc_det2";
    fs::remove_all(d1);
    fs::remove_all(d2);
    const RunOutcome o1 = run_sde_experiment(cfg, d1.string());
    const RunOutcome o2 = run_sde_experiment(cfg, d2.string());
    const bool ok = slurp(o1.diag_csv) == slurp(o2.diag_csv) &&
                    slurp(d1 / "snap_5.csv") == slurp(d2 / "snap_5.csv");
    criterion(11, "bitwise run determinism", ok,
              ok ? "diag.csv + snapshots byte-identical" : "outputs differ");
    fs::remove_all(d1);
    fs::remove_all(d2);
  } catch (const std::exception& e) {
    criterion(11, "bitwise run determinism", false, e.what());
  }

  std::printf("%s: %d/11 criteria passed\n", failures == 0 ? "OK" : "FAILED",
              11 - failures);
  return failures == 0 ? 0 : 1;
}
