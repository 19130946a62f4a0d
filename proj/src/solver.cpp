#include "vb/solver.hpp"

#include <cmath>

namespace vb {

double Trajectory::dt() const {
  if (times.size() < 2) throw std::runtime_error("trajectory has fewer than 2 snapshots");
  return times[1] - times[0];
}

double energy_h(const Field& m, const FamilyParams& p, double mean_u) {
  const Field u = velocity_of(m, p, mean_u);
  const Field ux = spectral_deriv(u, 1);
  return 0.5 * quadrature(p.alpha * (u * u) + p.beta * (ux * ux));
}

Field velocity_of(const Field& m, const FamilyParams& p, double mean_u) {
  p.validate();
  return helmholtz_solve(m, p.alpha, p.beta, mean_u);
}

Field family_rhs(const Field& m, const FamilyParams& p, double mean_u) {
  const Field u = velocity_of(m, p, mean_u);
  const Field ux = spectral_deriv(u, 1);
  const Field mx = spectral_deriv(m, 1);
  Field rhs = -multiply_dealiased(u, mx) - 2.0 * multiply_dealiased(m, ux);
  if (p.a != 0.0) rhs -= p.a * spectral_deriv(u, 3);
  return rhs;
}

Rk4Result rk4_simulate(const Field& m0, const FamilyParams& p, double dt,
                       double t_end, double mean_u, int snap_every) {
  p.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_simulate: dt must be > 0");
  if (snap_every < 1) throw std::invalid_argument("rk4_simulate: snap_every must be >= 1");
  const long nsteps = std::lround(t_end / dt);

  Rk4Result res;
  auto record = [&](double t, const Field& m) {
    res.diag.times.push_back(t);
    res.diag.energy.push_back(energy_h(m, p, mean_u));
    res.diag.momentum.push_back(quadrature(m));
  };
  auto snapshot = [&](double t, const Field& m) {
    res.traj.times.push_back(t);
    res.traj.snapshots.push_back(m);
  };

  Field m = m0;
  record(0.0, m);
  snapshot(0.0, m);
  for (long s = 0; s < nsteps; ++s) {
    const Field k1 = family_rhs(m, p, mean_u);
    const Field k2 = family_rhs(m + (dt / 2) * k1, p, mean_u);
    const Field k3 = family_rhs(m + (dt / 2) * k2, p, mean_u);
    const Field k4 = family_rhs(m + dt * k3, p, mean_u);
    m += (dt / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!m.finite())
      throw NumericalBlowup("rk4_simulate: non-finite state at step " + std::to_string(s));
    const double t = (s + 1) * dt;
    record(t, m);
    if ((s + 1) % snap_every == 0) snapshot(t, m);
  }
  return res;
}

double kdv_soliton(double k, double a, double x, double t) {
  const double c = 4.0 * a * k * k;
  const double s = 1.0 / std::cosh(k * (x - c * t));
  return c * s * s;
}

Field kdv_soliton_field(PeriodicGrid grid, double k, double a, double t) {
  const double c = 4.0 * a * k * k;
  const double L = grid.length;
  return Field::sample(grid, [&](double x) {
    // wrap the argument so the profile tracks the peak across the seam
    double arg = x - c * t;
    arg -= L * std::floor(arg / L + 0.5);
    const double s = 1.0 / std::cosh(k * arg);
    return c * s * s;
  });
}

Field kdv_soliton_time_deriv(PeriodicGrid grid, double k, double a, double t) {
  const double c = 4.0 * a * k * k;
  const double L = grid.length;
  return Field::sample(grid, [&](double x) {
    double arg = x - c * t;
    arg -= L * std::floor(arg / L + 0.5);
    const double sech = 1.0 / std::cosh(k * arg);
    return 2.0 * c * c * k * sech * sech * std::tanh(k * arg);
  });
}

std::vector<Field> pde_residual(const Trajectory& u_traj, const FamilyParams& p) {
  if (u_traj.size() < 3)
    throw std::invalid_argument("pde_residual: need at least 3 snapshots");
  const double dt = u_traj.dt();
  std::vector<Field> out;
  for (int i = 1; i + 1 < u_traj.size(); ++i) {
    const Field u_t = (1.0 / (2.0 * dt)) *
                      (u_traj.snapshots[i + 1] - u_traj.snapshots[i - 1]);
    out.push_back(ep_residual(u_traj.snapshots[i], u_t, p));
  }
  return out;
}

double peak_location(const Field& f) {
  int jbest = 0;
  for (int j = 1; j < f.size(); ++j)
    if (f[j] > f[jbest]) jbest = j;
  // golden-section refinement of the trigonometric interpolant around
  // the best node
  const double h = f.grid().dx();
  double lo = f.grid().node(jbest) - h, hi = f.grid().node(jbest) + h;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = interpolate(f, c), fd = interpolate(f, d);
  for (int it = 0; it < 80; ++it) {
    if (fc > fd) {
      hi = d; d = c; fd = fc;
      c = hi - gr * (hi - lo);
      fc = interpolate(f, c);
    } else {
      lo = c; c = d; fc = fd;
      d = lo + gr * (hi - lo);
      fd = interpolate(f, d);
    }
  }
  double x = 0.5 * (lo + hi);
  const double L = f.grid().length;
  x -= L * std::floor(x / L);
  return x;
}

}  // namespace vb
