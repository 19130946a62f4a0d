#include "vb/algebra.hpp"

namespace vb {

AlgebraElement ad(const AlgebraElement& X, const AlgebraElement& Y) {
  require_same_grid(X.u, Y.u);
  const Field ux = spectral_deriv(X.u, 1);
  const Field vx = spectral_deriv(Y.u, 1);
  const Field vxx = spectral_deriv(Y.u, 2);
  Field bracket = ux * Y.u - X.u * vx;
  return {std::move(bracket), quadrature(ux * vxx)};
}

double pair(const DualElement& M, const AlgebraElement& X) {
  require_same_grid(M.m, X.u);
  return M.b * X.a + quadrature(M.m * X.u);
}

DualElement coad(const AlgebraElement& X, const DualElement& M) {
  require_same_grid(X.u, M.m);
  const Field ux = spectral_deriv(X.u, 1);
  const Field mx = spectral_deriv(M.m, 1);
  const Field uxxx = spectral_deriv(X.u, 3);
  Field out = 2.0 * (M.m * ux) + X.u * mx + M.b * uxxx;
  return {std::move(out), 0.0};
}

DualElement var_derivative(const AlgebraElement& X, const FamilyParams& p) {
  Field m = p.alpha * X.u;
  if (p.beta != 0.0) m -= p.beta * spectral_deriv(X.u, 2);
  return {std::move(m), X.a};
}

Field ep_residual(const Field& u, const Field& u_t, const FamilyParams& p) {
  require_same_grid(u, u_t);
  const Field ux = spectral_deriv(u, 1);
  const Field uxx = spectral_deriv(u, 2);
  const Field uxxx = spectral_deriv(u, 3);
  Field r = p.alpha * (u_t + 3.0 * (u * ux));
  if (p.beta != 0.0)
    r -= p.beta * (spectral_deriv(u_t, 2) + 2.0 * (ux * uxx) + u * uxxx);
  if (p.a != 0.0) r += p.a * uxxx;
  return r;
}

DualElement clebsch_momentum_map(const CircleMap& l, const Field& pi, double lambda) {
  require_same_grid(l.displacement(), pi);
  require_diffeo(l, "clebsch_momentum_map");
  const Field lx = l.deriv();
  const Field lxx = l.second_deriv();
  Field m = -(pi * lx) + (lambda / 2.0) * spectral_deriv(lxx / lx, 1);
  return {std::move(m), lambda};
}

Field thm2_identity(const Field& u, const CircleMap& l, const Field& pi, double lambda) {
  require_same_grid(l.displacement(), u);
  require_same_grid(u, pi);
  require_diffeo(l, "thm2_identity");

  const Field lx = l.deriv();
  const Field lxx = l.second_deriv();
  const Field ux = spectral_deriv(u, 1);
  const Field uxx = spectral_deriv(u, 2);
  const Field uxxx = spectral_deriv(u, 3);
  const Field ulx = u * lx;
  const Field ulx_x = spectral_deriv(ulx, 1);
  const Field ulx_xx = spectral_deriv(ulx, 2);
  const Field lxx_over_lx_x = spectral_deriv(lxx / lx, 1);

  // A: the integrand after eliminating time derivatives with the advection
  // and pi-evolution rows.
  Field A = (lambda / 2.0) * spectral_deriv((lxx * ulx_x - lx * ulx_xx) / (lx * lx), 1)
          + lx * spectral_deriv(pi * u - (lambda / 2.0) * (uxx / lx), 1)
          + pi * ulx_x;

  // B: the integrand of the coadjoint pairing with the momentum map inserted.
  Field B = (lambda * lxx_over_lx_x - 2.0 * (pi * lx)) * ux
          + u * spectral_deriv((lambda / 2.0) * lxx_over_lx_x - pi * lx, 1)
          + lambda * uxxx;

  return A + B;
}

}  // namespace vb
