#pragma once

#include <Eigen/Dense>
#include <array>
#include <utility>
#include <vector>

#include "vb/algebra.hpp"
#include "vb/grid.hpp"
#include "vb/solver.hpp"

namespace vb {

/// Values of (l, u, pi), spatial derivatives through order 3, and first time
/// derivatives at one node. Concrete stand-in for a third-order jet.
struct JetSample {
  double l = 0, u = 0, pi = 0;
  double l_x = 0, u_x = 0, pi_x = 0;
  double l_xx = 0, u_xx = 0, pi_xx = 0;
  double l_xxx = 0, u_xxx = 0, pi_xxx = 0;
  double l_t = 0, u_t = 0, pi_t = 0;
};

/// Clebsch phase: inverse map l, velocity u, conjugate momentum pi, plus the
/// reconstructed angle theta and the multiplier lambda (= a).
struct ClebschState {
  CircleMap l;
  Field u;
  Field pi;
  double theta = 0.0;
  double lambda = 0.0;
};

/// Phase-space dimension of the Hamiltonian PDE form for given parameters:
/// 7 for a > 0, 4 for a = 0 and beta > 0, 3 for a = beta = 0.
int msi_dimension(const FamilyParams& p);

/// Constant antisymmetric M: single +-1 pair in the (l, pi) block.
Eigen::MatrixXd mass_matrix(int dim = 7);

/// State-dependent antisymmetric K(z); dim deduced from z.size().
/// Component order: (l, u, pi, Delta, Theta, Xi, Pi).
Eigen::MatrixXd flux_matrix(const Eigen::VectorXd& z, const FamilyParams& p);

/// d K / d z_c for Newton Jacobians.
Eigen::MatrixXd flux_matrix_deriv(const Eigen::VectorXd& z, const FamilyParams& p, int c);

double hamiltonian(const Eigen::VectorXd& z, const FamilyParams& p);
Eigen::VectorXd grad_H(const Eigen::VectorXd& z, const FamilyParams& p);
Eigen::MatrixXd hess_H(const Eigen::VectorXd& z, const FamilyParams& p);

/// (l, u, pi, l_x, u_x, l_xx, u_xx) read off a jet sample.
Eigen::VectorXd project_jet(const JetSample& j, int dim = 7);
Eigen::VectorXd project_jet_t(const JetSample& j, int dim = 7);  // time derivative
Eigen::VectorXd project_jet_x(const JetSample& j, int dim = 7);  // space derivative

/// Pointwise residual M z_t + K(z) z_x - grad H(z).
Eigen::VectorXd msi_residual(const Eigen::VectorXd& z, const Eigen::VectorXd& z_t,
                             const Eigen::VectorXd& z_x, const FamilyParams& p);

/// Residuals of the three Clebsch rows:
///   (i)   alpha u - beta u_xx + pi l_x - (a/2) d/dx (l_xx / l_x)
///   (ii)  l_t + u l_x
///   (iii) pi_t + d/dx (pi u - (a/2) u_xx / l_x)
std::array<Field, 3> clebsch_residual(const Field& u, const CircleMap& l, const Field& pi,
                                      const Field& u_t, const Field& l_t, const Field& pi_t,
                                      const FamilyParams& p);

/// l = identity, pi = -(alpha u0 - beta u0_xx), theta = 0, lambda = a.
ClebschState init_from_velocity(const Field& u0, const FamilyParams& p);

/// Node values of a first-variation vector (V^1, V^2, V^3) and the spatial
/// derivatives of its l and u components through order 2.
struct VariationNode {
  double l = 0, u = 0, pi = 0;
  double l_x = 0, u_x = 0;
  double l_xx = 0, u_xx = 0;
};

/// Bridges symplecticity densities (F, G) for two variations at one jet.
std::pair<double, double> symplectic_density(const VariationNode& V, const VariationNode& W,
                                             const JetSample& j, const FamilyParams& p);

// ---------------------------------------------------------------------------
// Field-level machinery
// ---------------------------------------------------------------------------

/// Nodal samples of the z phase. Component 0 stores the periodic displacement
/// of l (l = x + d), so every stored field is periodic.
struct ZStateField {
  PeriodicGrid grid;
  std::vector<Field> comps;  // size = dim

  int dim() const { return static_cast<int>(comps.size()); }
  Eigen::VectorXd node(int j) const;  // with l = x_j + d_j
};

/// Lift a Clebsch state to the z phase with spectral derivatives.
ZStateField lift_state(const ClebschState& cs, const FamilyParams& p);

struct NewtonOpts {
  double tol = 1e-11;
  int max_iter = 25;
};

struct NewtonStats {
  int iterations = 0;
  double residual_norm = 0.0;
};

/// Preissman box scheme for M z_t + K(z) z_x = grad H(z): cell-centered
/// implicit midpoint, Newton with the analytic Jacobian (flux-matrix
/// linearization plus the Hessian of H), sparse periodic structure.
class BoxScheme {
 public:
  BoxScheme(PeriodicGrid grid, FamilyParams p, NewtonOpts opts = {});

  ZStateField step(const ZStateField& z, double dt, NewtonStats* stats = nullptr);

  const std::vector<NewtonStats>& history() const { return history_; }

 private:
  PeriodicGrid grid_;
  FamilyParams p_;
  NewtonOpts opts_;
  int dim_;
  std::vector<NewtonStats> history_;
};

/// One first variation (delta l, delta u, delta pi) as periodic fields.
struct VariationField {
  Field dl, du, dpi;
};

struct ClebschTrajectory {
  std::vector<double> times;
  std::vector<CircleMap> l;
  std::vector<Field> u;
  std::vector<Field> pi;
};

struct ClebschSimResult {
  ClebschTrajectory base;
  std::vector<VariationField> V;  // tangent solutions along the base flow
  std::vector<VariationField> W;
};

/// Velocity determined by the delta-u row from (l, pi).
Field clebsch_velocity(const CircleMap& l, const Field& pi, const FamilyParams& p,
                       double mean_u = 0.0);

/// Integrates the Clebsch flow (l, pi prognostic, u eliminated) together with
/// two tangent (linearized) solutions, by joint RK4.
ClebschSimResult clebsch_simulate_with_variations(const ClebschState& init,
                                                  const VariationField& v0,
                                                  const VariationField& w0,
                                                  const FamilyParams& p, double dt,
                                                  double t_end, double mean_u = 0.0,
                                                  int snap_every = 1);

/// F and G fields at one stored time.
std::pair<Field, Field> symplectic_density_fields(const CircleMap& l, const Field& u,
                                                  const Field& pi, const VariationField& V,
                                                  const VariationField& W,
                                                  const FamilyParams& p);

/// Centered-in-time d_t F + spectral d_x G at interior stored times for
/// arbitrary aligned variation trajectories.
std::vector<Field> symplecticity_residual(const ClebschTrajectory& base,
                                          const std::vector<VariationField>& V,
                                          const std::vector<VariationField>& W,
                                          const FamilyParams& p);

}  // namespace vb
