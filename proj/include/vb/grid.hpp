#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vb {

struct GridMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct MonotonicityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Uniform periodic grid on a circle of circumference `length`,
/// nodes x_j = j * length / n.
struct PeriodicGrid {
  int n = 0;
  double length = 0.0;

  PeriodicGrid() = default;
  PeriodicGrid(int n_, double length_) : n(n_), length(length_) {
    if (n < 8) throw std::invalid_argument("PeriodicGrid: n must be >= 8");
    if (!(length > 0.0)) throw std::invalid_argument("PeriodicGrid: length must be > 0");
  }

  double dx() const { return length / n; }
  double node(int j) const { return j * length / n; }
  bool operator==(const PeriodicGrid&) const = default;
};

/// Real samples of a periodic function on a PeriodicGrid.
class Field {
 public:
  Field() = default;
  Field(PeriodicGrid grid, std::vector<double> values);
  explicit Field(PeriodicGrid grid, double fill = 0.0);

  static Field sample(PeriodicGrid grid, const std::function<double(double)>& f);

  const PeriodicGrid& grid() const { return grid_; }
  int size() const { return grid_.n; }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }
  double operator[](int j) const { return v_[j]; }
  double& operator[](int j) { return v_[j]; }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator-(Field a) { return a *= -1.0; }

  /// Pointwise (exact nodal) product.
  friend Field operator*(const Field& a, const Field& b);
  /// Pointwise quotient; caller guarantees b bounded away from zero.
  friend Field operator/(const Field& a, const Field& b);

  double max_abs() const;
  bool finite() const;

 private:
  PeriodicGrid grid_;
  std::vector<double> v_;
};

void require_same_grid(const Field& a, const Field& b);

/// Fourier-diagonal differentiation; exact for band-limited data.
/// For odd derivative orders the unmatched Nyquist mode is zeroed.
Field spectral_deriv(const Field& f, int order);

/// Centered second-order finite difference first derivative (box-scheme
/// interior consistency checks only; spectral_deriv is the default).
Field fd_deriv(const Field& f);

/// Trapezoid rule on the periodic grid: mean(values) * length.
double quadrature(const Field& f);

double mean(const Field& f);

/// Solves alpha*u - beta*u_xx = m mode by mode. For alpha == 0 the zero
/// mode of u is set to mean_u; requires |mean(m)| below tolerance then.
Field helmholtz_solve(const Field& m, double alpha, double beta, double mean_u = 0.0);

/// Band-limited (trigonometric) interpolation at an arbitrary point.
double interpolate(const Field& f, double x);

/// Trigonometric interpolation at many points with a single transform.
std::vector<double> interpolate_many(const Field& f, const std::vector<double>& xs);

/// Periodic translation: samples of f(x - s), evaluated spectrally.
Field shift_field(const Field& f, double s);

/// Zeroes all modes with |k| index > n/3 (two-thirds rule).
Field dealias(const Field& f);

/// Dealiased pointwise product, for nonlinear right-hand sides.
Field multiply_dealiased(const Field& a, const Field& b);

/// Random band-limited field: modes 1..kmax with decaying coefficients,
/// deterministic in `seed`. Zero mean unless with_mean.
Field random_band_limited(PeriodicGrid grid, int kmax, unsigned seed,
                          double amplitude = 1.0, bool with_mean = false);

/// Degree-1 circle map x -> x + d(x) with periodic displacement d.
/// Represents both forward configurations psi and inverse maps l.
class CircleMap {
 public:
  CircleMap() = default;
  explicit CircleMap(Field displacement) : d_(std::move(displacement)) {}

  static CircleMap identity(PeriodicGrid grid) { return CircleMap(Field(grid)); }

  const PeriodicGrid& grid() const { return d_.grid(); }
  const Field& displacement() const { return d_; }
  Field& displacement() { return d_; }

  /// Map values at the nodes, x_j + d_j.
  Field map_values() const;
  /// First derivative 1 + d_x (periodic, spectral).
  Field deriv() const;
  Field second_deriv() const { return spectral_deriv(d_, 2); }
  Field third_deriv() const { return spectral_deriv(d_, 3); }

  double operator()(double x) const { return x + interpolate(d_, x); }

  double min_deriv() const;
  bool is_diffeo(double guard = kMonotonicityGuard) const { return min_deriv() > guard; }

  /// min(1 + d_x) must exceed this; mean derivative is 1 for winding 1.
  static constexpr double kMonotonicityGuard = 1e-6;

 private:
  Field d_;
};

void require_diffeo(const CircleMap& m, const char* what);

}  // namespace vb
