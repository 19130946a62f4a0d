#include "vb/verify.hpp"

#include <algorithm>
#include <cmath>

#include "vb/algebra.hpp"
#include "vb/msi.hpp"
#include "vb/reconstruction.hpp"
#include "vb/solver.hpp"
#include "vb/stochastic.hpp"

namespace vb {

bool VerifyReport::all_passed() const {
  return std::all_of(results.begin(), results.end(),
                     [](const PropertyResult& r) { return r.passed; });
}

namespace {

struct Suite {
  std::string filter;
  double tol_scale;
  VerifyReport report;

  void check(const std::string& name, const std::string& tag, double residual,
             double tol) {
    if (!filter.empty() && tag.find(filter) == std::string::npos &&
        name.find(filter) == std::string::npos)
      return;
    const double t = tol * tol_scale;
    report.results.push_back({name, tag, residual, t, residual <= t});
  }
};

AlgebraElement random_algebra(PeriodicGrid g, int kmax, unsigned seed) {
  return {random_band_limited(g, kmax, seed, 1.0, true), std::cos(double(seed))};
}

// A smooth random (u, l, pi, lambda) tuple with l a comfortable diffeo.
struct RandomPhase {
  Field u, pi;
  CircleMap l;
  double lambda;
};

RandomPhase random_phase(PeriodicGrid g, unsigned seed, double disp_amp = 0.25) {
  RandomPhase ph{random_band_limited(g, 5, seed, 1.0, true),
                 random_band_limited(g, 5, seed + 1000, 1.0, true),
                 CircleMap(random_band_limited(g, 4, seed + 2000, disp_amp)),
                 std::sin(double(seed)) + 1.5};
  return ph;
}

double duality_residual() {
  PeriodicGrid g(128, 2.0 * M_PI);
  double worst = 0.0;
  for (unsigned s = 0; s < 100; ++s) {
    const auto X = random_algebra(g, 8, 3 * s);
    const auto Y = random_algebra(g, 8, 3 * s + 1);
    const auto Mx = random_algebra(g, 8, 3 * s + 2);
    const DualElement M{Mx.u, Mx.a};
    const double lhs = pair(coad(X, M), Y);
    const auto adXY = ad(X, Y);
    const double rhs = pair(M, adXY);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double antisymmetry_residual() {
  PeriodicGrid g(128, 2.0 * M_PI);
  double worst = 0.0;
  for (unsigned s = 0; s < 50; ++s) {
    const auto X = random_algebra(g, 8, 2 * s);
    const auto Y = random_algebra(g, 8, 2 * s + 1);
    const auto ab = ad(X, Y);
    const auto ba = ad(Y, X);
    worst = std::max(worst, (ab.u + ba.u).max_abs());
    worst = std::max(worst, std::abs(ab.a + ba.a));
  }
  return worst;
}

double jacobi_residual() {
  PeriodicGrid g(128, 2.0 * M_PI);
  double worst = 0.0;
  for (unsigned s = 0; s < 100; ++s) {
    const auto X = random_algebra(g, 6, 3 * s);
    const auto Y = random_algebra(g, 6, 3 * s + 1);
    const auto Z = random_algebra(g, 6, 3 * s + 2);
    auto cyc = [&](const AlgebraElement& A, const AlgebraElement& B,
                   const AlgebraElement& C) { return ad(A, ad(B, C)); };
    const auto t1 = cyc(X, Y, Z);
    const auto t2 = cyc(Y, Z, X);
    const auto t3 = cyc(Z, X, Y);
    const Field sum_u = t1.u + t2.u + t3.u;
    const double sum_a = t1.a + t2.a + t3.a;
    const double scale = std::max({t1.u.max_abs(), t2.u.max_abs(), t3.u.max_abs(),
                                   std::abs(t1.a), std::abs(t2.a), std::abs(t3.a), 1.0});
    worst = std::max(worst, std::max(sum_u.max_abs(), std::abs(sum_a)) / scale);
  }
  return worst;
}

double coad_central_slot_residual() {
  PeriodicGrid g(128, 2.0 * M_PI);
  double worst = 0.0;
  for (unsigned s = 0; s < 20; ++s) {
    const auto X = random_algebra(g, 8, 2 * s);
    const auto Mx = random_algebra(g, 8, 2 * s + 1);
    worst = std::max(worst, std::abs(coad(X, {Mx.u, Mx.a}).b));
  }
  return worst;
}

double thm2_residual() {
  PeriodicGrid g(256, 2.0 * M_PI);
  double worst = 0.0;
  for (unsigned s = 0; s < 50; ++s) {
    const auto ph = random_phase(g, 17 * s + 1);
    const Field sum = thm2_identity(ph.u, ph.l, ph.pi, ph.lambda);
    // relative to the magnitude of the separate integrands
    const Field A_only = thm2_identity(ph.u, ph.l, ph.pi, 0.0);  // lambda terms drop
    const double scale = std::max({sum.max_abs(), A_only.max_abs(), 1.0});
    (void)A_only;
    // scale by the largest individual term instead: third derivatives dominate
    const double mag = std::max(1.0, spectral_deriv(ph.u, 3).max_abs() *
                                          (std::abs(ph.lambda) + 1.0));
    worst = std::max(worst, sum.max_abs() / std::max(scale, mag));
  }
  return worst;
}

double helmholtz_residual() {
  PeriodicGrid g(128, 2.0 * M_PI);
  double worst = 0.0;
  const double cases[][2] = {{1.0, 0.0}, {1.0, 1.0}, {0.3, 2.0}, {0.0, 1.0}};
  for (unsigned s = 0; s < 20; ++s)
    for (auto [alpha, beta] : cases) {
      Field m = random_band_limited(g, 20, s + 1, 1.0, alpha != 0.0);
      const Field u = helmholtz_solve(m, alpha, beta, 0.7);
      Field back = alpha * u - beta * spectral_deriv(u, 2);
      if (alpha == 0.0) {
        // zero mode is gauge; compare mean-free parts
        const double mb = mean(back);
        for (int j = 0; j < back.size(); ++j) back[j] -= mb;
      }
      worst = std::max(worst, (back - m).max_abs());
    }
  return worst;
}

double ibp_residual() {
  PeriodicGrid g(128, 2.0 * M_PI);
  double worst = 0.0;
  for (unsigned s = 0; s < 50; ++s) {
    const Field f = random_band_limited(g, 20, 2 * s, 1.0, true);
    const Field h = random_band_limited(g, 20, 2 * s + 1, 1.0, true);
    worst = std::max(worst, std::abs(quadrature(f * spectral_deriv(h, 1)) +
                                     quadrature(spectral_deriv(f, 1) * h)));
  }
  return worst;
}

// Rows of the first-order Hamiltonian form against the Clebsch rows on the
// same jet data.
double thm3_residual(const FamilyParams& p) {
  PeriodicGrid g(128, 2.0 * M_PI);
  const int dim = msi_dimension(p);
  double worst = 0.0;
  for (unsigned s = 0; s < 25; ++s) {
    const auto ph = random_phase(g, 31 * s + 7);
    const Field u_t = random_band_limited(g, 5, 41 * s + 3, 1.0, true);
    const Field l_t = random_band_limited(g, 5, 41 * s + 4, 0.3);
    const Field pi_t = random_band_limited(g, 5, 41 * s + 5, 1.0, true);

    const auto cr = clebsch_residual(ph.u, ph.l, ph.pi, u_t, l_t, pi_t, p);

    const Field lval = ph.l.map_values();
    const Field lx = ph.l.deriv(), lxx = ph.l.second_deriv(), lxxx = ph.l.third_deriv();
    const Field ux = spectral_deriv(ph.u, 1), uxx = spectral_deriv(ph.u, 2),
                uxxx = spectral_deriv(ph.u, 3);
    const Field pix = spectral_deriv(ph.pi, 1);
    const Field lxt = spectral_deriv(l_t, 1), uxt = spectral_deriv(u_t, 1);
    const Field lxxt = spectral_deriv(l_t, 2), uxxt = spectral_deriv(u_t, 2);

    for (int j = 0; j < g.n; ++j) {
      Eigen::VectorXd z(dim), zt(dim), zx(dim);
      z(0) = lval[j]; z(1) = ph.u[j]; z(2) = ph.pi[j];
      zt(0) = l_t[j]; zt(1) = u_t[j]; zt(2) = pi_t[j];
      zx(0) = lx[j]; zx(1) = ux[j]; zx(2) = pix[j];
      if (dim == 4) {
        z(3) = ux[j]; zt(3) = uxt[j]; zx(3) = uxx[j];
      }
      if (dim == 7) {
        z(3) = lx[j]; z(4) = ux[j]; z(5) = lxx[j]; z(6) = uxx[j];
        zt(3) = lxt[j]; zt(4) = uxt[j]; zt(5) = lxxt[j]; zt(6) = uxxt[j];
        zx(3) = lxx[j]; zx(4) = uxx[j]; zx(5) = lxxx[j]; zx(6) = uxxx[j];
      }
      const Eigen::VectorXd r = msi_residual(z, zt, zx, p);
      // rows 1..3 match the Clebsch rows up to fixed signs; the algebraic
      // rows vanish identically on exact jet data
      const double scale =
          std::max({1.0, std::abs(cr[0][j]), std::abs(cr[1][j]), std::abs(cr[2][j])});
      worst = std::max(worst, std::abs(r(0) - cr[2][j]) / scale);
      worst = std::max(worst, std::abs(r(1) + cr[0][j]) / scale);
      worst = std::max(worst, std::abs(r(2) + cr[1][j]) / scale);
      for (int q = 3; q < dim; ++q)
        worst = std::max(worst, std::abs(r(q)) / scale);
    }
  }
  return worst;
}

double msi_antisymmetry_residual() {
  double worst = 0.0;
  for (unsigned s = 0; s < 20; ++s) {
    Eigen::VectorXd z = Eigen::VectorXd::Random(7);
    z(3) = 1.0 + 0.5 * z(3);  // keep Delta away from the guard
    const FamilyParams p{1.0, 0.5, 1.2};
    const Eigen::MatrixXd K = flux_matrix(z, p);
    const Eigen::MatrixXd M = mass_matrix(7);
    worst = std::max(worst, (K + K.transpose()).cwiseAbs().maxCoeff());
    worst = std::max(worst, (M + M.transpose()).cwiseAbs().maxCoeff());
  }
  return worst;
}

double grad_h_fd_residual() {
  const FamilyParams p{1.0, 0.7, 1.3};
  double worst = 0.0;
  for (unsigned s = 0; s < 20; ++s) {
    Eigen::VectorXd z = Eigen::VectorXd::Random(7);
    z(3) = 1.0 + 0.5 * z(3);
    const Eigen::VectorXd g = grad_H(z, p);
    for (int c = 0; c < 7; ++c) {
      const double h = 1e-5 * std::max(1.0, std::abs(z(c)));
      Eigen::VectorXd zp = z, zm = z;
      zp(c) += h;
      zm(c) -= h;
      const double fd = (hamiltonian(zp, p) - hamiltonian(zm, p)) / (2 * h);
      worst = std::max(worst, std::abs(fd - g(c)) / std::max(1.0, std::abs(g(c))));
    }
  }
  return worst;
}

double fg_antisymmetry_residual() {
  const FamilyParams p{1.0, 0.5, 1.1};
  JetSample j;
  j.u = 0.3; j.pi = -0.2; j.l_x = 1.2; j.l_xx = 0.1; j.u_x = 0.4; j.u_xx = -0.5;
  double worst = 0.0;
  for (unsigned s = 0; s < 10; ++s) {
    auto rnd = [&](unsigned q) {
      return std::sin(3.7 * q + 1.3 * s);
    };
    VariationNode V{rnd(0), rnd(1), rnd(2), rnd(3), rnd(4), rnd(5), rnd(6)};
    VariationNode W{rnd(7), rnd(8), rnd(9), rnd(10), rnd(11), rnd(12), rnd(13)};
    const auto [Fvw, Gvw] = symplectic_density(V, W, j, p);
    const auto [Fwv, Gwv] = symplectic_density(W, V, j, p);
    const auto [Fvv, Gvv] = symplectic_density(V, V, j, p);
    worst = std::max({worst, std::abs(Fvw + Fwv), std::abs(Gvw + Gwv),
                      std::abs(Fvv), std::abs(Gvv)});
  }
  return worst;
}

double cocycle_endpoint_residual() {
  PeriodicGrid g(256, 2.0 * M_PI);
  double worst = 0.0;
  for (unsigned s = 0; s < 10; ++s) {
    const CircleDiffeo psi(random_band_limited(g, 4, s + 11, 0.3));
    const CircleDiffeo id = CircleMap::identity(g);
    worst = std::max(worst, std::abs(bott_cocycle(id, psi)));
    worst = std::max(worst, std::abs(bott_cocycle(psi, id)));
  }
  return worst;
}

double cocycle_identity_residual() {
  PeriodicGrid g(256, 2.0 * M_PI);
  double worst = 0.0;
  for (unsigned s = 0; s < 10; ++s) {
    const CircleDiffeo p1(random_band_limited(g, 4, 3 * s + 1, 0.25));
    const CircleDiffeo p2(random_band_limited(g, 4, 3 * s + 2, 0.25));
    const CircleDiffeo p3(random_band_limited(g, 4, 3 * s + 3, 0.25));
    const double r = bott_cocycle(p2, p3) - bott_cocycle(compose(p1, p2), p3) +
                     bott_cocycle(p1, compose(p2, p3)) - bott_cocycle(p1, p2);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

double group_associativity_residual() {
  PeriodicGrid g(256, 2.0 * M_PI);
  double worst = 0.0;
  for (unsigned s = 0; s < 6; ++s) {
    const GroupElement g1{CircleDiffeo(random_band_limited(g, 4, 5 * s + 1, 0.25)), 0.3};
    const GroupElement g2{CircleDiffeo(random_band_limited(g, 4, 5 * s + 2, 0.25)), -1.1};
    const GroupElement g3{CircleDiffeo(random_band_limited(g, 4, 5 * s + 3, 0.25)), 0.7};
    const GroupElement left = group_compose(group_compose(g1, g2), g3);
    const GroupElement right = group_compose(g1, group_compose(g2, g3));
    worst = std::max(worst, std::abs(left.theta - right.theta));
    worst = std::max(worst,
                     (left.psi.displacement() - right.psi.displacement()).max_abs());
  }
  return worst;
}

double stochastic_equivalence_residual() {
  PeriodicGrid g(128, 2.0 * M_PI);
  const FamilyParams p{1.0, 0.5, 1.4};
  double worst = 0.0;
  for (unsigned s = 0; s < 20; ++s) {
    // low-band fields: the 2/3 mask is inert, products are alias-free, and
    // the k^3 roundoff amplification in the third derivatives stays small
    const Field m = random_band_limited(g, 5, 2 * s + 1, 0.5, true);
    const Field xi = random_band_limited(g, 5, 2 * s + 2, 0.5, true);
    const Field u = helmholtz_solve(m, p.alpha, p.beta);

    const Field via_j = -1.0 * j_operator(m, xi, p.a);
    const DualElement via_coad = coad({xi, p.a}, {m, p.a});
    const Field xix = spectral_deriv(xi, 1);
    Field bracket = p.alpha * (2.0 * (xix * u) + xi * spectral_deriv(u, 1)) -
                    p.beta * (2.0 * (xix * spectral_deriv(u, 2)) +
                              xi * spectral_deriv(u, 3)) +
                    p.a * spectral_deriv(xi, 3);
    worst = std::max(worst, (via_j + via_coad.m).max_abs());
    worst = std::max(worst, (via_j + bracket).max_abs());
  }
  return worst;
}

double momentum_flux_residual() {
  PeriodicGrid g(128, 2.0 * M_PI);
  double worst = 0.0;
  const FamilyParams cases[] = {{1.0, 0.0, 1.0}, {1.0, 1.0, 0.0}, {1.0, 1.0, 2.0}};
  for (unsigned s = 0; s < 20; ++s)
    for (const auto& p : cases) {
      const Field m = random_band_limited(g, 10, s + 5, 1.0, true);
      worst = std::max(worst, std::abs(quadrature(family_rhs(m, p))));
    }
  return worst;
}

}  // namespace

VerifyReport verify_suite(const std::string& filter, double tol_scale) {
  Suite s{filter, tol_scale, {}};
  s.check("algebra-duality", "algebra", duality_residual(), 1e-10);
  s.check("algebra-antisymmetry", "algebra", antisymmetry_residual(), 1e-12);
  s.check("algebra-jacobi", "algebra", jacobi_residual(), 1e-9);
  s.check("coad-central-slot", "algebra", coad_central_slot_residual(), 0.0);
  s.check("thm2-elimination", "thm2", thm2_residual(), 1e-8);
  s.check("helmholtz-right-inverse", "grid", helmholtz_residual(), 1e-10);
  s.check("integration-by-parts", "grid", ibp_residual(), 1e-10);
  s.check("thm3-full-a-positive", "thm3", thm3_residual({1.0, 0.5, 1.2}), 1e-9);
  s.check("thm3-reduced-ch", "thm3", thm3_residual({1.0, 1.0, 0.0}), 1e-9);
  s.check("thm3-reduced-burgers", "thm3", thm3_residual({1.0, 0.0, 0.0}), 1e-9);
  s.check("msi-antisymmetry", "msi", msi_antisymmetry_residual(), 1e-15);
  s.check("grad-h-finite-difference", "msi", grad_h_fd_residual(), 1e-7);
  s.check("fg-density-antisymmetry", "msi", fg_antisymmetry_residual(), 1e-15);
  s.check("bott-cocycle-endpoints", "cocycle", cocycle_endpoint_residual(), 1e-10);
  s.check("bott-cocycle-identity", "cocycle", cocycle_identity_residual(), 1e-8);
  s.check("group-associativity", "cocycle", group_associativity_residual(), 1e-8);
  s.check("stochastic-three-way", "stochastic", stochastic_equivalence_residual(), 1e-11);
  s.check("momentum-flux-zero", "conservation", momentum_flux_residual(), 1e-11);
  return s.report;
}

}  // namespace vb
