#pragma once

#include <cstdint>
#include <vector>

#include "vb/msi.hpp"
#include "vb/solver.hpp"

namespace vb {

/// Seeded discrete Wiener path. Refinement inserts Brownian-bridge midpoints,
/// preserving the coarse values at shared stamps exactly.
class BrownianPath {
 public:
  static BrownianPath generate(std::uint64_t seed, double dt, double t_end);

  BrownianPath refine() const;

  std::uint64_t seed() const { return seed_; }
  double dt() const { return dt_; }
  int steps() const { return static_cast<int>(increments_.size()); }
  const std::vector<double>& increments() const { return increments_; }
  /// W at t_k = k * dt, k = 0..steps().
  const std::vector<double>& values() const { return w_; }

 private:
  std::uint64_t seed_ = 0;
  int level_ = 0;  // number of bridge refinements applied
  double dt_ = 0.0;
  std::vector<double> increments_;
  std::vector<double> w_;

  void rebuild_cumulative();
};

/// Spatial correlation profile of the single-driver transport noise.
struct NoiseSpec {
  Field xi;

  static NoiseSpec constant(PeriodicGrid grid, double gamma) {
    return {Field(grid, gamma)};
  }
};

/// J(g) = (m g)_x + m g_x + a g_xxx, dealiased products.
Field j_operator(const Field& m, const Field& g, double a);

struct SdeRhs {
  Field drift;      // -J(u)
  Field diffusion;  // -J(xi)
};

/// Drift and Stratonovich diffusion fields of the deformed momentum equation.
SdeRhs stochastic_rhs(const Field& m, const FamilyParams& p, const NoiseSpec& noise,
                      double mean_u = 0.0);

/// One Heun (predictor/trapezoid) step for dm = drift dt + diffusion o dW.
Field heun_stratonovich_step(const Field& m, double dt, double dW, const FamilyParams& p,
                             const NoiseSpec& noise, double mean_u = 0.0);

struct SdeResult {
  Trajectory traj;  // momentum snapshots
  SimDiagnostics diag;
};

/// Heun integration along a supplied path; snapshots every `snap_every` steps.
SdeResult simulate_sde(const Field& m0, const FamilyParams& p, const NoiseSpec& noise,
                       const BrownianPath& path, double mean_u = 0.0, int snap_every = 1);

/// Convenience overload generating the path from (seed, dt, t_end).
SdeResult simulate_sde(const Field& m0, const FamilyParams& p, const NoiseSpec& noise,
                       double dt, double t_end, std::uint64_t seed, double mean_u = 0.0,
                       int snap_every = 1);

/// u(x - gamma W(t), t) from a deterministic trajectory: the exact solution
/// of the deformed equation for constant xi = gamma.
Trajectory shifted_reference(const Trajectory& det_traj, double gamma,
                             const std::vector<double>& w_at_times);

/// Gbar density of the heuristic stochastic symplecticity law (diagnostic).
double stochastic_symplectic_density(const VariationNode& V, const VariationNode& W,
                                     const JetSample& j, double a, double xi,
                                     double xi_xx);

Field stochastic_symplectic_density_fields(const CircleMap& l, const VariationField& V,
                                           const VariationField& W, const FamilyParams& p,
                                           const NoiseSpec& noise);

}  // namespace vb
