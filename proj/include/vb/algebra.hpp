#pragma once

#include "vb/grid.hpp"

namespace vb {

/// Element (u, a) of the Virasoro algebra: a periodic velocity field plus
/// the central coordinate.
struct AlgebraElement {
  Field u;
  double a = 0.0;
};

/// Element (m, b) of the dual, identified via the L2 pairing.
struct DualElement {
  Field m;
  double b = 0.0;
};

/// Coefficients (alpha, beta, a) selecting a member of the KdV/CH/HS family.
struct FamilyParams {
  double alpha = 1.0;
  double beta = 0.0;
  double a = 0.0;

  void validate() const {
    if (alpha < 0.0 || beta < 0.0 || a < 0.0)
      throw std::invalid_argument("FamilyParams: alpha, beta, a must be >= 0");
    if (alpha == 0.0 && beta == 0.0)
      throw std::invalid_argument("FamilyParams: alpha + beta must be > 0");
  }
};

/// Bracket ad_X Y = (-u v_x + u_x v, \int u_x v_xx dx).
AlgebraElement ad(const AlgebraElement& X, const AlgebraElement& Y);

/// <(m,b),(u,a)> = a b + \int m u dx.
double pair(const DualElement& M, const AlgebraElement& X);

/// ad*_X M = (2 m u_x + u m_x + b u_xxx, 0). Central slot is exactly zero.
DualElement coad(const AlgebraElement& X, const DualElement& M);

/// Variational derivative of the reduced Lagrangian: (alpha u - beta u_xx, a).
DualElement var_derivative(const AlgebraElement& X, const FamilyParams& p);

/// Residual of the family equation
///   alpha (u_t + 3 u u_x) - beta (u_xxt + 2 u_x u_xx + u u_xxx) + a u_xxx.
Field ep_residual(const Field& u, const Field& u_t, const FamilyParams& p);

/// Momentum map (-pi l_x + (lambda/2) d/dx (l_xx / l_x), lambda).
DualElement clebsch_momentum_map(const CircleMap& l, const Field& pi, double lambda);

/// Pointwise sum A + B of the two integrands in the elimination argument:
/// vanishes identically for arbitrary smooth (u, l, pi) and constant lambda.
Field thm2_identity(const Field& u, const CircleMap& l, const Field& pi, double lambda);

}  // namespace vb
