#pragma once

#include <vector>

#include "vb/grid.hpp"
#include "vb/solver.hpp"

namespace vb {

/// Orientation-preserving circle diffeomorphism of winding number 1,
/// stored as identity plus periodic displacement.
using CircleDiffeo = CircleMap;

/// (psi, theta) in the centrally extended diffeomorphism group.
struct GroupElement {
  CircleDiffeo psi;
  double theta = 0.0;
};

/// psi1 after psi2 (displacements composed with trigonometric interpolation).
CircleDiffeo compose(const CircleDiffeo& psi1, const CircleDiffeo& psi2);

/// Pointwise inverse by guarded Newton on psi(y) = x.
CircleDiffeo invert(const CircleDiffeo& psi);

/// B(psi1, psi2) = 1/2 \int log d(psi1 o psi2)/dx  d log(d psi2/dx).
double bott_cocycle(const CircleDiffeo& psi1, const CircleDiffeo& psi2);

/// (psi1 o psi2, B(psi1, psi2) + theta1 + theta2).
GroupElement group_compose(const GroupElement& g1, const GroupElement& g2);

GroupElement group_inverse(const GroupElement& g);

struct DiffeoTrajectory {
  std::vector<double> times;
  std::vector<CircleDiffeo> maps;
};

/// Integrates characteristics dpsi/dt = u(psi, t) with RK4; consumes the
/// velocity trajectory two snapshots per step (stages use the stored
/// midpoint snapshot), so the step size is twice the snapshot cadence.
DiffeoTrajectory forward_map_from_velocity(const Trajectory& u_traj);

/// Method-of-lines RK4 for l_t + u l_x = 0 on the displacement of l,
/// consuming the velocity trajectory two snapshots per step.
DiffeoTrajectory advect_inverse_map(const CircleMap& l0, const Trajectory& u_traj);

struct ThetaSeries {
  std::vector<double> times;
  std::vector<double> theta;
  std::vector<double> rate;  // cocycle rate r(t) = 1/2 \int u_x l_xx / l_x dx
};

/// theta(t) from d theta/dt = a - r(t), integrated by Simpson over snapshot
/// pairs; requires aligned u and l trajectories with an odd snapshot count.
ThetaSeries theta_reconstruct(const Trajectory& u_traj, const DiffeoTrajectory& l_traj,
                              double a, double theta0);

/// Cocycle rate at one instant directly from the fields.
double cocycle_rate(const Field& u, const CircleMap& l);

}  // namespace vb
