#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vb/stochastic.hpp"

using namespace vb;

TEST_CASE("wiener path generation and bridge refinement") {
  const BrownianPath p1 = BrownianPath::generate(123, 0.01, 1.0);
  const BrownianPath p2 = BrownianPath::generate(123, 0.01, 1.0);
  CHECK(p1.steps() == 100);
  CHECK(p1.values().size() == 101);
  for (int k = 0; k <= p1.steps(); ++k) CHECK(p1.values()[k] == p2.values()[k]);

  const BrownianPath q = BrownianPath::generate(7, 0.01, 1.0);
  CHECK(q.values()[50] != p1.values()[50]);

  // refinement keeps every coarse value at shared stamps exactly
  const BrownianPath fine = p1.refine();
  CHECK(fine.steps() == 200);
  CHECK(fine.dt() == doctest::Approx(0.005));
  for (int k = 0; k <= p1.steps(); ++k)
    CHECK(fine.values()[2 * k] == doctest::Approx(p1.values()[k]).epsilon(1e-14));

  // refinement is itself deterministic
  const BrownianPath fine2 = p2.refine();
  for (int k = 0; k <= fine.steps(); ++k) CHECK(fine.values()[k] == fine2.values()[k]);
}

TEST_CASE("transport operator closed forms") {
  PeriodicGrid g(128, 2.0 * M_PI);
  const Field s = Field::sample(g, [](double x) { return std::sin(x); });
  const Field zero(g);

  // pure dispersion: a g_xxx = -cos x
  const Field r1 = j_operator(zero, s, 1.0);
  double worst = 0.0;
  for (int j = 0; j < g.n; ++j)
    worst = std::max(worst, std::abs(r1[j] + std::cos(g.node(j))));
  CHECK(worst <= 1e-10);  // g_xxx amplifies FFT roundoff by kmax^3

  // g = 1: J(1) = m_x
  const Field m = random_band_limited(g, 8, 3, 1.0, true);
  CHECK((j_operator(m, Field(g, 1.0), 0.0) - spectral_deriv(m, 1)).max_abs() <= 1e-12);

  CHECK(j_operator(zero, s, 0.0).max_abs() == 0.0);
}

TEST_CASE("drift and diffusion fields") {
  PeriodicGrid g(128, 2.0 * M_PI);
  const FamilyParams p{1.0, 0.5, 1.0};
  const Field m = random_band_limited(g, 8, 11, 0.5, true);

  const SdeRhs quiet = stochastic_rhs(m, p, {Field(g)});
  CHECK(quiet.diffusion.max_abs() == 0.0);
  CHECK((quiet.drift - family_rhs(m, p)).max_abs() == 0.0);

  // constant profile: diffusion = -gamma m_x
  const SdeRhs drifted = stochastic_rhs(m, p, NoiseSpec::constant(g, 0.8));
  CHECK((drifted.diffusion + 0.8 * spectral_deriv(m, 1)).max_abs() <= 1e-12);
}

TEST_CASE("predictor-corrector step reduces to the deterministic scheme") {
  PeriodicGrid g(128, 2.0 * M_PI);
  const FamilyParams p{1.0, 1.0, 0.0};
  const Field m = random_band_limited(g, 6, 4, 0.5, true);
  const double dt = 1e-3;

  const Field stepped = heun_stratonovich_step(m, dt, 0.0, p, {Field(g)});
  const Field k1 = family_rhs(m, p);
  const Field k2 = family_rhs(m + dt * k1, p);
  const Field manual = m + (dt / 2) * (k1 + k2);
  CHECK((stepped - manual).max_abs() <= 1e-14);
}

TEST_CASE("path integration is reproducible and conserves momentum") {
  PeriodicGrid g(128, 2.0 * M_PI);
  const FamilyParams p{1.0, 1.0, 0.0};
  const Field u0 = Field::sample(g, [](double x) { return 0.3 * std::sin(x); });
  const Field m0 = u0 - spectral_deriv(u0, 2);
  // constant profile: int m dx is pathwise conserved (a non-constant profile
  // injects int m xi_x dx per unit noise increment)
  const NoiseSpec noise = NoiseSpec::constant(g, 0.4);

  const SdeResult r1 = simulate_sde(m0, p, noise, 1e-3, 0.1, 42);
  const SdeResult r2 = simulate_sde(m0, p, noise, 1e-3, 0.1, 42);
  for (int j = 0; j < g.n; ++j)
    CHECK(r1.traj.snapshots.back()[j] == r2.traj.snapshots.back()[j]);  // bitwise

  // pathwise Casimir-like conservation
  CHECK(std::abs(r1.diag.momentum.back() - r1.diag.momentum.front()) <= 1e-10);
  CHECK(r1.diag.hbar.size() == r1.diag.times.size());

  // zero profile reproduces the deterministic predictor-corrector run exactly
  const SdeResult quiet = simulate_sde(m0, p, {Field(g)}, 1e-3, 0.05, 42);
  Field manual = m0;
  for (int k = 0; k < 50; ++k)
    manual = heun_stratonovich_step(manual, 1e-3, 0.0, p, {Field(g)});
  CHECK((quiet.traj.snapshots.back() - manual).max_abs() == 0.0);
}

TEST_CASE("shifted deterministic reference") {
  PeriodicGrid g(128, 2.0 * M_PI);
  Trajectory det;
  const Field f = random_band_limited(g, 6, 8, 1.0, true);
  for (int i = 0; i < 3; ++i) {
    det.times.push_back(0.1 * i);
    det.snapshots.push_back(f);
  }

  const Trajectory same = shifted_reference(det, 0.0, {0.3, -0.2, 0.9});
  CHECK((same.snapshots[1] - f).max_abs() <= 1e-14);

  // a shift by exactly one period is invisible
  const Trajectory wrapped = shifted_reference(det, 1.0, {g.length, g.length, g.length});
  CHECK((wrapped.snapshots[2] - f).max_abs() <= 1e-12);

  CHECK_THROWS_AS(shifted_reference(det, 1.0, {0.0}), std::invalid_argument);
}

TEST_CASE("stochastic density reduces to the deterministic one for flat noise") {
  const FamilyParams p{1.0, 0.0, 1.2};
  JetSample j;
  j.l_x = 1.4;
  VariationNode V{0.3, -0.1, 0.7, 0.2, -0.5, 0.9, 0.4};
  VariationNode W{-0.6, 0.8, 0.1, -0.3, 0.5, -0.2, 0.7};

  CHECK(stochastic_symplectic_density(V, V, j, p.a, 0.9, 0.1) == 0.0);
  CHECK(stochastic_symplectic_density(V, W, j, p.a, 0.0, 0.0) == 0.0);

  // xi = gamma constant: Gbar = gamma * F
  const double gamma = 0.9;
  const double gbar = stochastic_symplectic_density(V, W, j, p.a, gamma, 0.0);
  const double F = symplectic_density(V, W, j, p).first;
  CHECK(gbar == doctest::Approx(gamma * F).epsilon(1e-14));
}
