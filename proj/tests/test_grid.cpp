#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "vb/grid.hpp"
#include "vb/io.hpp"

using namespace vb;

namespace {
double max_err(const Field& f, const std::function<double(double)>& ref) {
  double worst = 0.0;
  for (int j = 0; j < f.size(); ++j)
    worst = std::max(worst, std::abs(f[j] - ref(f.grid().node(j))));
  return worst;
}
}  // namespace

TEST_CASE("grid invariants") {
  CHECK_THROWS_AS(PeriodicGrid(4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(PeriodicGrid(64, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(PeriodicGrid(64, -1.0), std::invalid_argument);
  PeriodicGrid g(64, 2.0 * M_PI);
  CHECK(g.dx() == doctest::Approx(2.0 * M_PI / 64));
  CHECK(g.node(0) == 0.0);
  CHECK(g.node(63) < g.length);
}

TEST_CASE("field arithmetic requires identical grids") {
  Field a(PeriodicGrid(64, 2.0 * M_PI), 1.0);
  Field b(PeriodicGrid(64, 4.0), 1.0);
  CHECK_THROWS_AS(a + b, GridMismatch);
  CHECK_THROWS_AS(a * b, GridMismatch);
}

TEST_CASE("spectral derivative of resolved modes") {
  PeriodicGrid g(64, 2.0 * M_PI);
  const Field s = Field::sample(g, [](double x) { return std::sin(x); });
  CHECK(max_err(spectral_deriv(s, 1), [](double x) { return std::cos(x); }) <= 1e-12);

  const Field c(g, 3.7);
  for (int order : {1, 2, 3})
    CHECK(spectral_deriv(c, order).max_abs() <= 1e-13);

  const Field s3 = Field::sample(g, [](double x) { return std::sin(3 * x); });
  CHECK(max_err(spectral_deriv(s3, 3),
                [](double x) { return -27.0 * std::cos(3 * x); }) <= 1e-10);

  CHECK_THROWS_AS(spectral_deriv(s, 0), std::invalid_argument);
}

TEST_CASE("spectral derivative is linear") {
  PeriodicGrid g(64, 2.0 * M_PI);
  const Field f = random_band_limited(g, 15, 1, 1.0, true);
  const Field h = random_band_limited(g, 15, 2, 1.0, true);
  const Field lhs = spectral_deriv(2.5 * f + (-1.25) * h, 1);
  const Field rhs = 2.5 * spectral_deriv(f, 1) + (-1.25) * spectral_deriv(h, 1);
  CHECK((lhs - rhs).max_abs() <= 1e-12);
}

TEST_CASE("quadrature") {
  PeriodicGrid g(64, 2.0 * M_PI);
  CHECK(quadrature(Field(g, 1.0)) == doctest::Approx(2.0 * M_PI).epsilon(1e-14));
  const Field s = Field::sample(g, [](double x) { return std::sin(x); });
  CHECK(std::abs(quadrature(s)) <= 1e-14);
  CHECK(quadrature(s * s) == doctest::Approx(M_PI).epsilon(1e-12));
  // periodic fundamental theorem
  const Field f = random_band_limited(g, 20, 3, 1.0, true);
  CHECK(std::abs(quadrature(spectral_deriv(f, 1))) <= 1e-12);
}

TEST_CASE("integration by parts") {
  PeriodicGrid g(128, 2.0 * M_PI);
  for (unsigned s = 0; s < 10; ++s) {
    const Field f = random_band_limited(g, 20, 2 * s, 1.0, true);
    const Field h = random_band_limited(g, 20, 2 * s + 1, 1.0, true);
    CHECK(std::abs(quadrature(f * spectral_deriv(h, 1)) +
                   quadrature(spectral_deriv(f, 1) * h)) <= 1e-10);
  }
}

TEST_CASE("helmholtz solve") {
  PeriodicGrid g(64, 2.0 * M_PI);
  const Field s = Field::sample(g, [](double x) { return std::sin(x); });

  // alpha = 1, beta = 0: identity
  const Field m = random_band_limited(g, 10, 7, 1.0, true);
  CHECK((helmholtz_solve(m, 1.0, 0.0) - m).max_abs() <= 1e-14);

  // (1 + 1) sin x inverts to sin x
  CHECK((helmholtz_solve(2.0 * s, 1.0, 1.0) - s).max_abs() <= 1e-13);

  // -u_xx = sin x with prescribed zero mean
  CHECK((helmholtz_solve(s, 0.0, 1.0, 0.0) - s).max_abs() <= 1e-13);

  // alpha = 0 sets the zero mode to mean_u
  const Field u = helmholtz_solve(s, 0.0, 1.0, 0.75);
  CHECK(mean(u) == doctest::Approx(0.75).epsilon(1e-13));

  CHECK_THROWS_AS(helmholtz_solve(m, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(helmholtz_solve(Field(g, 1.0), 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("helmholtz is the right inverse") {
  PeriodicGrid g(128, 2.0 * M_PI);
  for (auto [alpha, beta] : {std::pair{1.0, 0.0}, {1.0, 1.0}, {0.5, 2.0}}) {
    const Field m = random_band_limited(g, 30, 11, 1.0, true);
    const Field u = helmholtz_solve(m, alpha, beta);
    const Field back = alpha * u - beta * spectral_deriv(u, 2);
    CHECK((back - m).max_abs() <= 1e-10);
  }
}

TEST_CASE("trigonometric interpolation") {
  PeriodicGrid g(32, 2.0 * M_PI);
  const Field s = Field::sample(g, [](double x) { return std::sin(x); });
  CHECK(interpolate(s, M_PI / 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(interpolate(Field(g, 4.2), 1.234) == doctest::Approx(4.2).epsilon(1e-13));
  const Field s2 = Field::sample(g, [](double x) { return std::sin(2 * x); });
  CHECK(interpolate(s2, 0.3) == doctest::Approx(std::sin(0.6)).epsilon(1e-12));
  // exact at nodes; periodic reduction of the query point
  CHECK(interpolate(s, g.node(5)) == doctest::Approx(s[5]).epsilon(1e-13));
  CHECK(interpolate(s, 0.3 + 2.0 * M_PI) == doctest::Approx(interpolate(s, 0.3)));
  // batched evaluation matches pointwise evaluation
  const auto many = interpolate_many(s2, {0.3, 1.7, 5.0});
  CHECK(many[0] == doctest::Approx(interpolate(s2, 0.3)).epsilon(1e-13));
  CHECK(many[2] == doctest::Approx(interpolate(s2, 5.0)).epsilon(1e-13));
}

TEST_CASE("spectral shift") {
  PeriodicGrid g(64, 2.0 * M_PI);
  const Field s = Field::sample(g, [](double x) { return std::sin(x); });
  CHECK(max_err(shift_field(s, 0.7), [](double x) { return std::sin(x - 0.7); }) <= 1e-13);
  CHECK((shift_field(s, g.length) - s).max_abs() <= 1e-12);
}

TEST_CASE("dealiasing removes the upper third of the spectrum") {
  PeriodicGrid g(48, 2.0 * M_PI);
  const Field low = Field::sample(g, [](double x) { return std::sin(5 * x); });
  CHECK((dealias(low) - low).max_abs() <= 1e-13);
  const Field high = Field::sample(g, [](double x) { return std::sin(20 * x); });
  CHECK(dealias(high).max_abs() <= 1e-13);
}

TEST_CASE("circle map monotonicity guard") {
  PeriodicGrid g(64, 2.0 * M_PI);
  CircleMap good(Field::sample(g, [](double x) { return 0.3 * std::sin(x); }));
  CHECK(good.is_diffeo());
  CHECK(good.min_deriv() == doctest::Approx(0.7).epsilon(1e-10));

  CircleMap bad(Field::sample(g, [](double x) { return -1.1 * std::sin(x); }));
  CHECK(!bad.is_diffeo());
  CHECK_THROWS_AS(require_diffeo(bad, "test"), MonotonicityError);

  const CircleMap id = CircleMap::identity(g);
  CHECK(id.deriv().max_abs() == doctest::Approx(1.0));
  CHECK(id(1.234) == doctest::Approx(1.234).epsilon(1e-13));
}

TEST_CASE("field CSV round-trips at full precision") {
  PeriodicGrid g(32, 40.0);
  const Field f = random_band_limited(g, 10, 99, 1.0 / 3.0, true);
  const auto path = std::filesystem::temp_directory_path() / "vb_roundtrip.csv";
  io::write_field_csv(path, f);
  const Field back = io::read_field_csv(path);
  REQUIRE(back.grid() == f.grid());
  for (int j = 0; j < f.size(); ++j) CHECK(back[j] == f[j]);  // bitwise
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".json");
}
