#pragma once

#include <optional>
#include <vector>

#include "vb/algebra.hpp"
#include "vb/grid.hpp"

namespace vb {

struct NumericalBlowup : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Snapshots of one prognostic field at increasing times.
struct Trajectory {
  std::vector<double> times;
  std::vector<Field> snapshots;

  int size() const { return static_cast<int>(times.size()); }
  double dt() const;  // uniform cadence between stored snapshots
};

/// Per-step conserved-quantity series recorded during a run.
struct SimDiagnostics {
  std::vector<double> times;
  std::vector<double> energy;      // h(m) = 1/2 \int (alpha u^2 + beta u_x^2)
  std::vector<double> momentum;    // \int m dx
  std::vector<double> hbar;        // \int xi m dx, when a noise profile is set
  std::vector<double> min_lx;      // when reconstruction is attached
};

double energy_h(const Field& m, const FamilyParams& p, double mean_u = 0.0);

/// Momentum-form right-hand side m_t = -(u m_x + 2 m u_x + a u_xxx) with
/// u = helmholtz_solve(m). Nonlinear products are dealiased (2/3 rule).
Field family_rhs(const Field& m, const FamilyParams& p, double mean_u = 0.0);

struct Rk4Result {
  Trajectory traj;      // snapshots of m at the configured cadence
  SimDiagnostics diag;
};

/// Classical RK4 on the momentum form. `snap_every` steps between stored
/// snapshots (the initial state is always stored).
Rk4Result rk4_simulate(const Field& m0, const FamilyParams& p, double dt,
                       double t_end, double mean_u = 0.0, int snap_every = 1);

/// Single-soliton closed form u(x,t) = 4 a k^2 sech^2(k (x - 4 a k^2 t)) for
/// the alpha = 1, beta = 0 member. Certified by ep_residual before use.
double kdv_soliton(double k, double a, double x, double t);

Field kdv_soliton_field(PeriodicGrid grid, double k, double a, double t);

/// Analytic time derivative of the soliton profile.
Field kdv_soliton_time_deriv(PeriodicGrid grid, double k, double a, double t);

/// Centered-in-time, spectral-in-space residual of the family equation for
/// each interior snapshot of a uniformly sampled velocity trajectory.
std::vector<Field> pde_residual(const Trajectory& u_traj, const FamilyParams& p);

/// Position of the interpolated maximum of f, refined from the best node.
double peak_location(const Field& f);

/// Velocity from momentum snapshots.
Field velocity_of(const Field& m, const FamilyParams& p, double mean_u = 0.0);

}  // namespace vb
