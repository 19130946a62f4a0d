#include "vb/stochastic.hpp"

#include <cmath>
#include <random>

namespace vb {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, int level) {
  // splitmix64 of (seed, level) so each refinement level draws an
  // independent, reproducible stream
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (level + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

void BrownianPath::rebuild_cumulative() {
  w_.assign(increments_.size() + 1, 0.0);
  for (size_t k = 0; k < increments_.size(); ++k) w_[k + 1] = w_[k] + increments_[k];
}

BrownianPath BrownianPath::generate(std::uint64_t seed, double dt, double t_end) {
  if (!(dt > 0.0)) throw std::invalid_argument("BrownianPath: dt must be > 0");
  const long n = std::lround(t_end / dt);
  BrownianPath p;
  p.seed_ = seed;
  p.dt_ = dt;
  std::mt19937_64 rng(mix_seed(seed, 0));
  std::normal_distribution<double> gauss(0.0, std::sqrt(dt));
  p.increments_.resize(n);
  for (long k = 0; k < n; ++k) p.increments_[k] = gauss(rng);
  p.rebuild_cumulative();
  return p;
}

BrownianPath BrownianPath::refine() const {
  BrownianPath p;
  p.seed_ = seed_;
  p.level_ = level_ + 1;
  p.dt_ = dt_ / 2.0;
  std::mt19937_64 rng(mix_seed(seed_, p.level_));
  // bridge midpoint: W_mid = (W_l + W_r)/2 + N(0, dt/4)
  std::normal_distribution<double> gauss(0.0, std::sqrt(dt_) / 2.0);
  p.increments_.resize(2 * increments_.size());
  for (size_t k = 0; k < increments_.size(); ++k) {
    const double half = 0.5 * increments_[k] + gauss(rng);
    p.increments_[2 * k] = half;
    p.increments_[2 * k + 1] = increments_[k] - half;
  }
  p.rebuild_cumulative();
  return p;
}

Field j_operator(const Field& m, const Field& g, double a) {
  require_same_grid(m, g);
  Field out = spectral_deriv(multiply_dealiased(m, g), 1) +
              multiply_dealiased(m, spectral_deriv(g, 1));
  if (a != 0.0) out += a * spectral_deriv(g, 3);
  return out;
}

SdeRhs stochastic_rhs(const Field& m, const FamilyParams& p, const NoiseSpec& noise,
                      double mean_u) {
  p.validate();
  require_same_grid(m, noise.xi);
  SdeRhs r{family_rhs(m, p, mean_u), -j_operator(m, noise.xi, p.a)};
  return r;
}

Field heun_stratonovich_step(const Field& m, double dt, double dW, const FamilyParams& p,
                             const NoiseSpec& noise, double mean_u) {
  const SdeRhs r0 = stochastic_rhs(m, p, noise, mean_u);
  const Field pred = m + dt * r0.drift + dW * r0.diffusion;
  const SdeRhs r1 = stochastic_rhs(pred, p, noise, mean_u);
  return m + (dt / 2) * (r0.drift + r1.drift) + (dW / 2) * (r0.diffusion + r1.diffusion);
}

SdeResult simulate_sde(const Field& m0, const FamilyParams& p, const NoiseSpec& noise,
                       const BrownianPath& path, double mean_u, int snap_every) {
  if (snap_every < 1) throw std::invalid_argument("simulate_sde: snap_every must be >= 1");
  SdeResult res;
  auto record = [&](double t, const Field& m) {
    res.diag.times.push_back(t);
    res.diag.energy.push_back(energy_h(m, p, mean_u));
    res.diag.momentum.push_back(quadrature(m));
    res.diag.hbar.push_back(quadrature(noise.xi * m));
  };
  auto snapshot = [&](double t, const Field& m) {
    res.traj.times.push_back(t);
    res.traj.snapshots.push_back(m);
  };

  Field m = m0;
  record(0.0, m);
  snapshot(0.0, m);
  const double dt = path.dt();
  for (int k = 0; k < path.steps(); ++k) {
    m = heun_stratonovich_step(m, dt, path.increments()[k], p, noise, mean_u);
    if (!m.finite())
      throw NumericalBlowup("simulate_sde: non-finite state at step " + std::to_string(k));
    const double t = (k + 1) * dt;
    record(t, m);
    if ((k + 1) % snap_every == 0) snapshot(t, m);
  }
  return res;
}

SdeResult simulate_sde(const Field& m0, const FamilyParams& p, const NoiseSpec& noise,
                       double dt, double t_end, std::uint64_t seed, double mean_u,
                       int snap_every) {
  return simulate_sde(m0, p, noise, BrownianPath::generate(seed, dt, t_end), mean_u,
                      snap_every);
}

Trajectory shifted_reference(const Trajectory& det_traj, double gamma,
                             const std::vector<double>& w_at_times) {
  if (w_at_times.size() != det_traj.times.size())
    throw std::invalid_argument("shifted_reference: stamp mismatch");
  Trajectory out;
  out.times = det_traj.times;
  for (size_t k = 0; k < det_traj.snapshots.size(); ++k)
    out.snapshots.push_back(shift_field(det_traj.snapshots[k], gamma * w_at_times[k]));
  return out;
}

double stochastic_symplectic_density(const VariationNode& V, const VariationNode& W,
                                     const JetSample& j, double a, double xi,
                                     double xi_xx) {
  double G = -xi * (W.l * V.pi - W.pi * V.l);
  if (a != 0.0) {
    const double lx2 = j.l_x * j.l_x;
    G -= 0.5 * a * (xi_xx / lx2) * (W.l * V.l_x - W.l_x * V.l);
  }
  return G;
}

Field stochastic_symplectic_density_fields(const CircleMap& l, const VariationField& V,
                                           const VariationField& W, const FamilyParams& p,
                                           const NoiseSpec& noise) {
  Field G = -noise.xi * (W.dl * V.dpi - W.dpi * V.dl);
  if (p.a != 0.0) {
    const Field lx = l.deriv();
    const Field xi_xx = spectral_deriv(noise.xi, 2);
    const Field v1x = spectral_deriv(V.dl, 1), w1x = spectral_deriv(W.dl, 1);
    G -= (0.5 * p.a) * ((xi_xx / (lx * lx)) * (W.dl * v1x - w1x * V.dl));
  }
  return G;
}

}  // namespace vb
