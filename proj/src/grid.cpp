#include "vb/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <map>
#include <memory>
#include <numeric>
#include <random>

namespace vb {
namespace {

// Per-thread FFTW plan cache keyed by transform size. Plans and buffers are
// reused across calls; fftw_execute on a shared plan is not thread safe, so
// each thread owns its cache.
struct FftPlans {
  int n;
  double* real;
  fftw_complex* cplx;
  fftw_plan fwd;
  fftw_plan inv;

  explicit FftPlans(int n_) : n(n_) {
    real = fftw_alloc_real(n);
    cplx = fftw_alloc_complex(n / 2 + 1);
    fwd = fftw_plan_dft_r2c_1d(n, real, cplx, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(n, cplx, real, FFTW_ESTIMATE);
  }
  ~FftPlans() {
    fftw_destroy_plan(inv);
    fftw_destroy_plan(fwd);
    fftw_free(cplx);
    fftw_free(real);
  }
  FftPlans(const FftPlans&) = delete;
};

FftPlans& plans_for(int n) {
  thread_local std::map<int, std::unique_ptr<FftPlans>> cache;
  auto& p = cache[n];
  if (!p) p = std::make_unique<FftPlans>(n);
  return *p;
}

std::vector<std::complex<double>> rfft(const std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  auto& p = plans_for(n);
  std::copy(v.begin(), v.end(), p.real);
  fftw_execute(p.fwd);
  std::vector<std::complex<double>> c(n / 2 + 1);
  for (int j = 0; j <= n / 2; ++j) c[j] = {p.cplx[j][0], p.cplx[j][1]};
  return c;
}

std::vector<double> irfft(const std::vector<std::complex<double>>& c, int n) {
  auto& p = plans_for(n);
  for (int j = 0; j <= n / 2; ++j) {
    p.cplx[j][0] = c[j].real();
    p.cplx[j][1] = c[j].imag();
  }
  fftw_execute(p.inv);
  std::vector<double> out(n);
  const double s = 1.0 / n;
  for (int j = 0; j < n; ++j) out[j] = p.real[j] * s;
  return out;
}

}  // namespace

Field::Field(PeriodicGrid grid, std::vector<double> values)
    : grid_(grid), v_(std::move(values)) {
  if (static_cast<int>(v_.size()) != grid_.n)
    throw std::invalid_argument("Field: value count does not match grid");
}

Field::Field(PeriodicGrid grid, double fill) : grid_(grid), v_(grid.n, fill) {}

Field Field::sample(PeriodicGrid grid, const std::function<double(double)>& f) {
  Field out(grid);
  for (int j = 0; j < grid.n; ++j) out[j] = f(grid.node(j));
  return out;
}

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch("fields live on different grids");
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(*this, o);
  for (int j = 0; j < size(); ++j) v_[j] += o.v_[j];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(*this, o);
  for (int j = 0; j < size(); ++j) v_[j] -= o.v_[j];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& x : v_) x *= s;
  return *this;
}

Field operator*(const Field& a, const Field& b) {
  require_same_grid(a, b);
  Field out = a;
  for (int j = 0; j < out.size(); ++j) out[j] *= b[j];
  return out;
}

Field operator/(const Field& a, const Field& b) {
  require_same_grid(a, b);
  Field out = a;
  for (int j = 0; j < out.size(); ++j) out[j] /= b[j];
  return out;
}

double Field::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

bool Field::finite() const {
  return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

Field spectral_deriv(const Field& f, int order) {
  if (order < 1) throw std::invalid_argument("spectral_deriv: order must be >= 1");
  const int n = f.size();
  const double k0 = 2.0 * M_PI / f.grid().length;
  auto c = rfft(f.values());
  for (int j = 0; j <= n / 2; ++j) {
    const std::complex<double> ik(0.0, k0 * j);
    std::complex<double> m = 1.0;
    for (int p = 0; p < order; ++p) m *= ik;
    c[j] *= m;
  }
  // Odd derivatives of the unmatched Nyquist mode are zeroed.
  if (n % 2 == 0 && order % 2 == 1) c[n / 2] = 0.0;
  return Field(f.grid(), irfft(c, n));
}

Field fd_deriv(const Field& f) {
  const int n = f.size();
  const double h2 = 2.0 * f.grid().dx();
  Field out(f.grid());
  for (int j = 0; j < n; ++j)
    out[j] = (f[(j + 1) % n] - f[(j + n - 1) % n]) / h2;
  return out;
}

double quadrature(const Field& f) { return mean(f) * f.grid().length; }

double mean(const Field& f) {
  return std::accumulate(f.values().begin(), f.values().end(), 0.0) / f.size();
}

Field helmholtz_solve(const Field& m, double alpha, double beta, double mean_u) {
  if (alpha < 0.0 || beta < 0.0)
    throw std::invalid_argument("helmholtz_solve: alpha, beta must be >= 0");
  if (alpha == 0.0 && beta == 0.0)
    throw std::invalid_argument("helmholtz_solve: alpha + beta must be > 0");
  const int n = m.size();
  const double k0 = 2.0 * M_PI / m.grid().length;
  auto c = rfft(m.values());
  if (alpha == 0.0) {
    const double scale = std::max(1.0, m.max_abs());
    if (std::abs(mean(m)) > 1e-10 * scale)
      throw std::invalid_argument("helmholtz_solve: alpha = 0 requires zero-mean m");
    c[0] = mean_u * static_cast<double>(n);
  } else {
    c[0] /= alpha;
  }
  for (int j = 1; j <= n / 2; ++j) {
    const double k = k0 * j;
    c[j] /= (alpha + beta * k * k);
  }
  return Field(m.grid(), irfft(c, n));
}

double interpolate(const Field& f, double x) {
  const int n = f.size();
  const double L = f.grid().length;
  x -= L * std::floor(x / L);
  const double k0 = 2.0 * M_PI / L;
  auto c = rfft(f.values());
  double s = c[0].real();
  const int half = (n - 1) / 2;
  for (int j = 1; j <= half; ++j) {
    const double kx = k0 * j * x;
    s += 2.0 * (c[j].real() * std::cos(kx) - c[j].imag() * std::sin(kx));
  }
  if (n % 2 == 0) s += c[n / 2].real() * std::cos(k0 * (n / 2) * x);
  return s / n;
}

std::vector<double> interpolate_many(const Field& f, const std::vector<double>& xs) {
  const int n = f.size();
  const double L = f.grid().length;
  const double k0 = 2.0 * M_PI / L;
  const auto c = rfft(f.values());
  const int half = (n - 1) / 2;
  std::vector<double> out(xs.size());
  for (size_t q = 0; q < xs.size(); ++q) {
    double x = xs[q];
    x -= L * std::floor(x / L);
    double s = c[0].real();
    for (int j = 1; j <= half; ++j) {
      const double kx = k0 * j * x;
      s += 2.0 * (c[j].real() * std::cos(kx) - c[j].imag() * std::sin(kx));
    }
    if (n % 2 == 0) s += c[n / 2].real() * std::cos(k0 * (n / 2) * x);
    out[q] = s / n;
  }
  return out;
}

Field shift_field(const Field& f, double s) {
  const int n = f.size();
  const double k0 = 2.0 * M_PI / f.grid().length;
  auto c = rfft(f.values());
  for (int j = 1; j <= n / 2; ++j) {
    const double ph = -k0 * j * s;
    c[j] *= std::complex<double>(std::cos(ph), std::sin(ph));
  }
  // keep the Nyquist coefficient real so the result stays real-valued
  if (n % 2 == 0) c[n / 2] = c[n / 2].real();
  return Field(f.grid(), irfft(c, n));
}

Field dealias(const Field& f) {
  const int n = f.size();
  auto c = rfft(f.values());
  for (int j = n / 3 + 1; j <= n / 2; ++j) c[j] = 0.0;
  return Field(f.grid(), irfft(c, n));
}

Field multiply_dealiased(const Field& a, const Field& b) { return dealias(a * b); }

Field random_band_limited(PeriodicGrid grid, int kmax, unsigned seed,
                          double amplitude, bool with_mean) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  const double k0 = 2.0 * M_PI / grid.length;
  std::vector<double> ak(kmax + 1), bk(kmax + 1);
  double norm = 0.0;
  for (int k = 1; k <= kmax; ++k) {
    const double decay = 1.0 / (1.0 + k * k);
    ak[k] = coeff(rng) * decay;
    bk[k] = coeff(rng) * decay;
    norm += std::abs(ak[k]) + std::abs(bk[k]);
  }
  const double m0 = with_mean ? coeff(rng) : 0.0;
  const double s = norm > 0 ? amplitude / norm : 0.0;
  Field out(grid);
  for (int j = 0; j < grid.n; ++j) {
    const double x = grid.node(j);
    double v = m0 * amplitude;
    for (int k = 1; k <= kmax; ++k)
      v += s * (ak[k] * std::cos(k0 * k * x) + bk[k] * std::sin(k0 * k * x));
    out[j] = v;
  }
  return out;
}

Field CircleMap::map_values() const {
  Field out = d_;
  for (int j = 0; j < out.size(); ++j) out[j] += grid().node(j);
  return out;
}

Field CircleMap::deriv() const {
  Field out = spectral_deriv(d_, 1);
  for (int j = 0; j < out.size(); ++j) out[j] += 1.0;
  return out;
}

double CircleMap::min_deriv() const {
  const Field dv = deriv();
  return *std::min_element(dv.values().begin(), dv.values().end());
}

void require_diffeo(const CircleMap& m, const char* what) {
  if (!m.is_diffeo())
    throw MonotonicityError(std::string(what) + ": map derivative fell below guard (" +
                            std::to_string(m.min_deriv()) + ")");
}

}  // namespace vb
