#include "vb/reconstruction.hpp"

#include <cmath>

namespace vb {

namespace {

Field log_field(const Field& f) {
  Field out = f;
  for (int j = 0; j < out.size(); ++j) {
    if (!(out[j] > 0.0))
      throw MonotonicityError("log of non-positive map derivative");
    out[j] = std::log(out[j]);
  }
  return out;
}

}  // namespace

CircleDiffeo compose(const CircleDiffeo& psi1, const CircleDiffeo& psi2) {
  require_diffeo(psi1, "compose");
  require_diffeo(psi2, "compose");
  const PeriodicGrid grid = psi1.grid();
  if (!(grid == psi2.grid())) throw GridMismatch("compose: different grids");
  // (psi1 o psi2)(x) = psi2(x) + d1(psi2(x))
  const Field inner = psi2.map_values();
  const auto d1_at = interpolate_many(psi1.displacement(), inner.values());
  Field d(grid);
  for (int j = 0; j < grid.n; ++j)
    d[j] = psi2.displacement()[j] + d1_at[j];
  CircleDiffeo out{std::move(d)};
  require_diffeo(out, "compose (result)");
  return out;
}

CircleDiffeo invert(const CircleDiffeo& psi) {
  require_diffeo(psi, "invert");
  const PeriodicGrid grid = psi.grid();
  const double bound = psi.displacement().max_abs() + grid.dx();
  const Field dpsi = spectral_deriv(psi.displacement(), 1);
  Field e(grid);
  for (int j = 0; j < grid.n; ++j) {
    const double x = grid.node(j);
    // solve psi(y) = x with Newton, bisection fallback on a monotone bracket
    double lo = x - bound, hi = x + bound;
    double y = x - interpolate(psi.displacement(), x);  // first-order guess
    for (int it = 0; it < 100; ++it) {
      const double f = psi(y) - x;
      if (std::abs(f) < 1e-14) break;
      if (f > 0.0) hi = y; else lo = y;
      const double slope = 1.0 + interpolate(dpsi, y);
      double ynew = y - f / slope;
      if (!(ynew > lo && ynew < hi)) ynew = 0.5 * (lo + hi);
      y = ynew;
    }
    e[j] = y - x;
  }
  CircleDiffeo out{std::move(e)};
  require_diffeo(out, "invert (result)");
  return out;
}

double bott_cocycle(const CircleDiffeo& psi1, const CircleDiffeo& psi2) {
  const CircleDiffeo comp = compose(psi1, psi2);
  const Field log_comp = log_field(comp.deriv());
  const Field dlog2 = spectral_deriv(log_field(psi2.deriv()), 1);
  return 0.5 * quadrature(log_comp * dlog2);
}

GroupElement group_compose(const GroupElement& g1, const GroupElement& g2) {
  return {compose(g1.psi, g2.psi), bott_cocycle(g1.psi, g2.psi) + g1.theta + g2.theta};
}

GroupElement group_inverse(const GroupElement& g) {
  CircleDiffeo inv = invert(g.psi);
  const double B = bott_cocycle(g.psi, inv);
  return {std::move(inv), -g.theta - B};
}

DiffeoTrajectory forward_map_from_velocity(const Trajectory& u_traj) {
  if (u_traj.size() < 3 || u_traj.size() % 2 == 0)
    throw std::invalid_argument("forward_map: need an odd snapshot count >= 3");
  const double h = u_traj.dt();
  const double dt = 2.0 * h;
  const PeriodicGrid grid = u_traj.snapshots[0].grid();

  DiffeoTrajectory out;
  std::vector<double> pos(grid.n);
  for (int j = 0; j < grid.n; ++j) pos[j] = grid.node(j);

  auto store = [&](double t) {
    Field d(grid);
    for (int j = 0; j < grid.n; ++j) d[j] = pos[j] - grid.node(j);
    CircleDiffeo psi{std::move(d)};
    require_diffeo(psi, "forward_map");
    out.times.push_back(t);
    out.maps.push_back(std::move(psi));
  };

  store(0.0);
  std::vector<double> tmp(grid.n);
  for (int s = 0; s + 2 < u_traj.size(); s += 2) {
    const Field& u0 = u_traj.snapshots[s];
    const Field& um = u_traj.snapshots[s + 1];
    const Field& u1 = u_traj.snapshots[s + 2];
    const auto k1 = interpolate_many(u0, pos);
    for (int j = 0; j < grid.n; ++j) tmp[j] = pos[j] + (dt / 2) * k1[j];
    const auto k2 = interpolate_many(um, tmp);
    for (int j = 0; j < grid.n; ++j) tmp[j] = pos[j] + (dt / 2) * k2[j];
    const auto k3 = interpolate_many(um, tmp);
    for (int j = 0; j < grid.n; ++j) tmp[j] = pos[j] + dt * k3[j];
    const auto k4 = interpolate_many(u1, tmp);
    for (int j = 0; j < grid.n; ++j)
      pos[j] += (dt / 6) * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    store(u_traj.times[s + 2]);
  }
  return out;
}

DiffeoTrajectory advect_inverse_map(const CircleMap& l0, const Trajectory& u_traj) {
  if (u_traj.size() < 3 || u_traj.size() % 2 == 0)
    throw std::invalid_argument("advect_inverse_map: need an odd snapshot count >= 3");
  require_diffeo(l0, "advect_inverse_map");
  const double dt = 2.0 * u_traj.dt();
  const PeriodicGrid grid = l0.grid();

  auto rhs = [&](const Field& e, const Field& u) {
    Field lx = spectral_deriv(e, 1);
    for (int j = 0; j < lx.size(); ++j) lx[j] += 1.0;
    return -multiply_dealiased(u, lx);
  };

  DiffeoTrajectory out;
  Field e = l0.displacement();
  auto store = [&](double t) {
    CircleMap l{e};
    require_diffeo(l, "advect_inverse_map");
    out.times.push_back(t);
    out.maps.push_back(std::move(l));
  };

  store(u_traj.times[0]);
  for (int s = 0; s + 2 < u_traj.size(); s += 2) {
    const Field& u0 = u_traj.snapshots[s];
    const Field& um = u_traj.snapshots[s + 1];
    const Field& u1 = u_traj.snapshots[s + 2];
    const Field k1 = rhs(e, u0);
    const Field k2 = rhs(e + (dt / 2) * k1, um);
    const Field k3 = rhs(e + (dt / 2) * k2, um);
    const Field k4 = rhs(e + dt * k3, u1);
    e += (dt / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    store(u_traj.times[s + 2]);
  }
  return out;
}

double cocycle_rate(const Field& u, const CircleMap& l) {
  require_diffeo(l, "cocycle_rate");
  const Field ux = spectral_deriv(u, 1);
  return 0.5 * quadrature((ux * l.second_deriv()) / l.deriv());
}

ThetaSeries theta_reconstruct(const Trajectory& u_traj, const DiffeoTrajectory& l_traj,
                              double a, double theta0) {
  const size_t nt = l_traj.times.size();
  if (u_traj.times.size() < nt)
    throw std::invalid_argument("theta_reconstruct: trajectories not aligned");
  // u_traj may be sampled at twice the cadence of l_traj (the advection
  // consumes two velocity snapshots per step); match stamps.
  const int stride = static_cast<int>((u_traj.times.size() - 1) / (nt - 1));

  ThetaSeries out;
  out.times = l_traj.times;
  for (size_t i = 0; i < nt; ++i) {
    const Field& u = u_traj.snapshots[i * stride];
    if (std::abs(u_traj.times[i * stride] - l_traj.times[i]) > 1e-12)
      throw std::invalid_argument("theta_reconstruct: stamp mismatch");
    out.rate.push_back(cocycle_rate(u, l_traj.maps[i]));
  }

  // cumulative quadrature of a - r(t): quadratic (three-point Newton-Cotes)
  // segments, one order above trapezoid
  out.theta.resize(nt);
  out.theta[0] = theta0;
  const double h = nt > 1 ? l_traj.times[1] - l_traj.times[0] : 0.0;
  auto f = [&](size_t i) { return a - out.rate[i]; };
  for (size_t i = 0; i + 1 < nt; ++i) {
    double inc;
    if (i + 2 < nt)
      inc = (h / 12.0) * (5.0 * f(i) + 8.0 * f(i + 1) - f(i + 2));
    else
      inc = (h / 12.0) * (-f(i - 1) + 8.0 * f(i) + 5.0 * f(i + 1));
    out.theta[i + 1] = out.theta[i] + inc;
  }
  return out;
}

}  // namespace vb
