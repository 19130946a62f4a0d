#include "vb/msi.hpp"

#include <Eigen/Sparse>

#include <cmath>

namespace vb {

namespace {

void require_delta(double delta, const char* what) {
  if (!(delta > CircleMap::kMonotonicityGuard))
    throw MonotonicityError(std::string(what) + ": Delta guard violated (Delta = " +
                            std::to_string(delta) + ")");
}

}  // namespace

int msi_dimension(const FamilyParams& p) {
  p.validate();
  if (p.a > 0.0) return 7;
  if (p.beta > 0.0) return 4;
  return 3;
}

Eigen::MatrixXd mass_matrix(int dim) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  M(0, 2) = 1.0;
  M(2, 0) = -1.0;
  return M;
}

Eigen::MatrixXd flux_matrix(const Eigen::VectorXd& z, const FamilyParams& p) {
  const int dim = static_cast<int>(z.size());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(dim, dim);
  const double u = z(1), pi = z(2);
  K(0, 1) = pi;
  K(0, 2) = u;
  if (dim >= 4) K(1, dim == 7 ? 4 : 3) = p.beta;
  if (dim == 7) {
    const double delta = z(3), xi = z(5), cap_pi = z(6);
    if (p.a > 0.0) require_delta(delta, "flux_matrix");
    const double d2 = delta * delta;
    K(0, 3) = 0.5 * p.a * cap_pi / d2;
    K(0, 6) = -0.5 * p.a / delta;
    K(1, 3) = -0.5 * p.a * xi / d2;
    K(1, 5) = 0.5 * p.a / delta;
    K(3, 4) = 0.5 * p.a / delta;
  }
  K -= Eigen::MatrixXd(K.transpose());  // lower triangle by antisymmetry
  return K;
}

Eigen::MatrixXd flux_matrix_deriv(const Eigen::VectorXd& z, const FamilyParams& p, int c) {
  const int dim = static_cast<int>(z.size());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(dim, dim);
  if (c == 1) D(0, 2) = 1.0;
  if (c == 2) D(0, 1) = 1.0;
  if (dim == 7) {
    const double delta = z(3), xi = z(5), cap_pi = z(6);
    const double d2 = delta * delta, d3 = d2 * delta;
    if (c == 3) {
      D(0, 3) = -p.a * cap_pi / d3;
      D(0, 6) = 0.5 * p.a / d2;
      D(1, 3) = p.a * xi / d3;
      D(1, 5) = -0.5 * p.a / d2;
      D(3, 4) = -0.5 * p.a / d2;
    } else if (c == 5) {
      D(1, 3) = -0.5 * p.a / d2;
    } else if (c == 6) {
      D(0, 3) = 0.5 * p.a / d2;
    }
  }
  D -= Eigen::MatrixXd(D.transpose());
  return D;
}

double hamiltonian(const Eigen::VectorXd& z, const FamilyParams& p) {
  const int dim = static_cast<int>(z.size());
  const double u = z(1);
  double H = 0.5 * p.alpha * u * u;
  if (dim >= 4) {
    const double theta = z(dim == 7 ? 4 : 3);
    H -= 0.5 * p.beta * theta * theta;
  }
  if (dim == 7) {
    const double delta = z(3), theta = z(4), xi = z(5), cap_pi = z(6);
    require_delta(delta, "hamiltonian");
    H += -0.5 * p.a * theta * xi / delta + 0.5 * p.a * cap_pi;
  }
  return H;
}

Eigen::VectorXd grad_H(const Eigen::VectorXd& z, const FamilyParams& p) {
  const int dim = static_cast<int>(z.size());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
  g(1) = p.alpha * z(1);
  if (dim == 4) g(3) = -p.beta * z(3);
  if (dim == 7) {
    const double delta = z(3), theta = z(4), xi = z(5);
    require_delta(delta, "grad_H");
    const double d2 = delta * delta;
    g(3) = 0.5 * p.a * theta * xi / d2;
    g(4) = -p.beta * theta - 0.5 * p.a * xi / delta;
    g(5) = -0.5 * p.a * theta / delta;
    g(6) = 0.5 * p.a;
  }
  return g;
}

Eigen::MatrixXd hess_H(const Eigen::VectorXd& z, const FamilyParams& p) {
  const int dim = static_cast<int>(z.size());
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  H(1, 1) = p.alpha;
  if (dim == 4) H(3, 3) = -p.beta;
  if (dim == 7) {
    const double delta = z(3), theta = z(4), xi = z(5);
    require_delta(delta, "hess_H");
    const double d2 = delta * delta, d3 = d2 * delta;
    H(3, 3) = -p.a * theta * xi / d3;
    H(3, 4) = H(4, 3) = 0.5 * p.a * xi / d2;
    H(3, 5) = H(5, 3) = 0.5 * p.a * theta / d2;
    H(4, 4) = -p.beta;
    H(4, 5) = H(5, 4) = -0.5 * p.a / delta;
  }
  return H;
}

Eigen::VectorXd project_jet(const JetSample& j, int dim) {
  Eigen::VectorXd z(dim);
  z(0) = j.l;
  z(1) = j.u;
  z(2) = j.pi;
  if (dim == 4) z(3) = j.u_x;
  if (dim == 7) {
    z(3) = j.l_x;
    z(4) = j.u_x;
    z(5) = j.l_xx;
    z(6) = j.u_xx;
  }
  return z;
}

Eigen::VectorXd msi_residual(const Eigen::VectorXd& z, const Eigen::VectorXd& z_t,
                             const Eigen::VectorXd& z_x, const FamilyParams& p) {
  if (z.size() != z_t.size() || z.size() != z_x.size())
    throw std::invalid_argument("msi_residual: inconsistent dimensions");
  return mass_matrix(static_cast<int>(z.size())) * z_t + flux_matrix(z, p) * z_x -
         grad_H(z, p);
}

std::array<Field, 3> clebsch_residual(const Field& u, const CircleMap& l, const Field& pi,
                                      const Field& u_t, const Field& l_t, const Field& pi_t,
                                      const FamilyParams& p) {
  require_diffeo(l, "clebsch_residual");
  const Field lx = l.deriv();
  const Field lxx = l.second_deriv();
  const Field uxx = spectral_deriv(u, 2);

  Field r1 = p.alpha * u + pi * lx;
  if (p.beta != 0.0) r1 -= p.beta * uxx;
  if (p.a != 0.0) r1 -= (p.a / 2.0) * spectral_deriv(lxx / lx, 1);

  Field r2 = l_t + u * lx;

  Field flux = pi * u;
  if (p.a != 0.0) flux -= (p.a / 2.0) * (uxx / lx);
  Field r3 = pi_t + spectral_deriv(flux, 1);

  return {std::move(r1), std::move(r2), std::move(r3)};
}

ClebschState init_from_velocity(const Field& u0, const FamilyParams& p) {
  p.validate();
  Field pi0 = -p.alpha * u0;
  if (p.beta != 0.0) pi0 += p.beta * spectral_deriv(u0, 2);
  return {CircleMap::identity(u0.grid()), u0, std::move(pi0), 0.0, p.a};
}

std::pair<double, double> symplectic_density(const VariationNode& V, const VariationNode& W,
                                             const JetSample& j, const FamilyParams& p) {
  const double F = -W.l * V.pi + W.pi * V.l;
  double G = -j.pi * (W.l * V.u - W.u * V.l) - j.u * (W.l * V.pi - W.pi * V.l) -
             p.beta * (W.u * V.u_x - W.u_x * V.u);
  if (p.a != 0.0) {
    require_delta(j.l_x, "symplectic_density");
    const double lx2 = j.l_x * j.l_x;
    const double half_a = 0.5 * p.a;
    G += -half_a * (j.u_xx / lx2) * (W.l * V.l_x - W.l_x * V.l)
         + (half_a / j.l_x) * (W.l * V.u_xx - W.u_xx * V.l)
         + half_a * (j.l_xx / lx2) * (W.u * V.l_x - W.l_x * V.u)
         - (half_a / j.l_x) * (W.u * V.l_xx - W.l_xx * V.u)
         - (half_a / j.l_x) * (W.l_x * V.u_x - W.u_x * V.l_x);
  }
  return {F, G};
}

// ---------------------------------------------------------------------------
// Field-level machinery
// ---------------------------------------------------------------------------

Eigen::VectorXd ZStateField::node(int j) const {
  Eigen::VectorXd z(dim());
  for (int c = 0; c < dim(); ++c) z(c) = comps[c][j];
  z(0) += grid.node(j);
  return z;
}

ZStateField lift_state(const ClebschState& cs, const FamilyParams& p) {
  const int dim = msi_dimension(p);
  ZStateField z{cs.u.grid(), {}};
  z.comps.push_back(cs.l.displacement());
  z.comps.push_back(cs.u);
  z.comps.push_back(cs.pi);
  if (dim == 4) z.comps.push_back(spectral_deriv(cs.u, 1));
  if (dim == 7) {
    z.comps.push_back(cs.l.deriv());
    z.comps.push_back(spectral_deriv(cs.u, 1));
    z.comps.push_back(cs.l.second_deriv());
    z.comps.push_back(spectral_deriv(cs.u, 2));
  }
  return z;
}

BoxScheme::BoxScheme(PeriodicGrid grid, FamilyParams p, NewtonOpts opts)
    : grid_(grid), p_(p), opts_(opts), dim_(msi_dimension(p)) {}

ZStateField BoxScheme::step(const ZStateField& zold, double dt, NewtonStats* stats) {
  if (!(dt > 0.0)) throw std::invalid_argument("BoxScheme::step: dt must be > 0");
  if (zold.dim() != dim_) throw std::invalid_argument("BoxScheme::step: wrong state dimension");
  const int n = grid_.n;
  const int dim = dim_;
  const double dx = grid_.dx();

  // Flattened nodal unknowns, component 0 as displacement.
  auto at = [dim](const Eigen::VectorXd& X, int node, int c) { return X(node * dim + c); };
  Eigen::VectorXd Xold(n * dim);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < dim; ++c) Xold(i * dim + c) = zold.comps[c][i];
  Eigen::VectorXd X = Xold;  // initial guess: previous state

  const Eigen::MatrixXd M = mass_matrix(dim);
  const std::vector<int> kdep = dim == 7 ? std::vector<int>{1, 2, 3, 5, 6}
                                         : std::vector<int>{1, 2};

  auto cell_quantities = [&](const Eigen::VectorXd& Xn, int j, Eigen::VectorXd& zbar,
                             Eigen::VectorXd& w, Eigen::VectorXd& zt) {
    const int jr = (j + 1) % n;
    zbar.resize(dim);
    w.resize(dim);
    zt.resize(dim);
    for (int c = 0; c < dim; ++c) {
      const double oL = at(Xold, j, c), oR = at(Xold, jr, c);
      const double nL = at(Xn, j, c), nR = at(Xn, jr, c);
      zbar(c) = 0.25 * (oL + oR + nL + nR);
      w(c) = ((oR + nR) - (oL + nL)) / (2.0 * dx);
      zt(c) = ((nL + nR) - (oL + oR)) / (2.0 * dt);
    }
    w(0) += 1.0;  // l = x + d, so the l-difference carries the node spacing
  };

  auto residual = [&](const Eigen::VectorXd& Xn) {
    Eigen::VectorXd R(n * dim);
    Eigen::VectorXd zbar, w, zt;
    for (int j = 0; j < n; ++j) {
      cell_quantities(Xn, j, zbar, w, zt);
      R.segment(j * dim, dim) = M * zt + flux_matrix(zbar, p_) * w - grad_H(zbar, p_);
    }
    return R;
  };

  NewtonStats st;
  Eigen::VectorXd R = residual(X);
  st.residual_norm = R.lpNorm<Eigen::Infinity>();

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(n) * 2 * dim * dim);
  Eigen::SparseMatrix<double> J(n * dim, n * dim);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;

  while (st.residual_norm > opts_.tol) {
    if (st.iterations >= opts_.max_iter)
      throw std::runtime_error("BoxScheme: Newton failed to converge, |R| = " +
                               std::to_string(st.residual_norm));
    trips.clear();
    Eigen::VectorXd zbar, w, zt;
    for (int j = 0; j < n; ++j) {
      const int jr = (j + 1) % n;
      cell_quantities(X, j, zbar, w, zt);
      const Eigen::MatrixXd K = flux_matrix(zbar, p_);
      Eigen::MatrixXd C = Eigen::MatrixXd::Zero(dim, dim);  // columns dK_c * w
      for (int c : kdep) C.col(c) = flux_matrix_deriv(zbar, p_, c) * w;
      const Eigen::MatrixXd common = 0.25 * (C - hess_H(zbar, p_)) + M / (2.0 * dt);
      const Eigen::MatrixXd BL = common - K / (2.0 * dx);
      const Eigen::MatrixXd BR = common + K / (2.0 * dx);
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) {
          trips.emplace_back(j * dim + r, j * dim + c, BL(r, c));
          trips.emplace_back(j * dim + r, jr * dim + c, BR(r, c));
        }
    }
    J.setFromTriplets(trips.begin(), trips.end());
    lu.compute(J);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("BoxScheme: singular Newton Jacobian");
    const Eigen::VectorXd dX = lu.solve(-R);

    // Damp toward the Delta guard if needed.
    double step = 1.0;
    for (int tries = 0; tries < 30; ++tries) {
      Eigen::VectorXd Xtry = X + step * dX;
      if (dim == 7) {
        double min_delta = Xtry(3);
        for (int i = 0; i < n; ++i) min_delta = std::min(min_delta, Xtry(i * dim + 3));
        if (!(min_delta > CircleMap::kMonotonicityGuard)) {
          step *= 0.5;
          continue;
        }
      }
      X = std::move(Xtry);
      break;
    }
    ++st.iterations;
    R = residual(X);
    st.residual_norm = R.lpNorm<Eigen::Infinity>();
  }

  history_.push_back(st);
  if (stats) *stats = st;

  ZStateField out{grid_, {}};
  for (int c = 0; c < dim; ++c) {
    Field f(grid_);
    for (int i = 0; i < n; ++i) f[i] = at(X, i, c);
    out.comps.push_back(std::move(f));
  }
  return out;
}

Field clebsch_velocity(const CircleMap& l, const Field& pi, const FamilyParams& p,
                       double mean_u) {
  require_diffeo(l, "clebsch_velocity");
  const Field lx = l.deriv();
  Field m = -(pi * lx);
  if (p.a != 0.0) m += (p.a / 2.0) * spectral_deriv(l.second_deriv() / lx, 1);
  return helmholtz_solve(m, p.alpha, p.beta, mean_u);
}

namespace {

// Joint state for the base Clebsch flow plus two tangent solutions.
struct FlowState {
  Field e, pi;        // base: l displacement and momentum
  Field v_dl, v_dpi;  // tangent V
  Field w_dl, w_dpi;  // tangent W

  FlowState& axpy(double s, const FlowState& o) {
    e += s * o.e; pi += s * o.pi;
    v_dl += s * o.v_dl; v_dpi += s * o.v_dpi;
    w_dl += s * o.w_dl; w_dpi += s * o.w_dpi;
    return *this;
  }
};

struct FlowRhs {
  FamilyParams p;
  double mean_u;

  Field base_velocity(const Field& e, const Field& pi, Field& lx, Field& lxx) const {
    lx = spectral_deriv(e, 1);
    for (int j = 0; j < lx.size(); ++j) lx[j] += 1.0;
    lxx = spectral_deriv(e, 2);
    Field m = -multiply_dealiased(pi, lx);
    if (p.a != 0.0) m += (p.a / 2.0) * spectral_deriv(dealias(lxx / lx), 1);
    return helmholtz_solve(m, p.alpha, p.beta, mean_u);
  }

  // Linearized velocity from the delta-u row.
  Field tangent_velocity(const Field& dl, const Field& dpi, const Field& pi,
                         const Field& lx, const Field& lxx) const {
    const Field dlx = spectral_deriv(dl, 1);
    Field dm = -multiply_dealiased(dpi, lx) - multiply_dealiased(pi, dlx);
    if (p.a != 0.0) {
      const Field dlxx = spectral_deriv(dl, 2);
      dm += (p.a / 2.0) *
            spectral_deriv(dealias(dlxx / lx - (lxx * dlx) / (lx * lx)), 1);
    }
    return helmholtz_solve(dm, p.alpha, p.beta, 0.0);
  }

  FlowState operator()(const FlowState& s) const {
    Field lx(s.e.grid()), lxx(s.e.grid());
    const Field u = base_velocity(s.e, s.pi, lx, lxx);
    const Field uxx = spectral_deriv(u, 2);

    FlowState d{Field(s.e.grid()), Field(s.e.grid()), Field(s.e.grid()),
                Field(s.e.grid()), Field(s.e.grid()), Field(s.e.grid())};
    d.e = -multiply_dealiased(u, lx);
    Field flux = multiply_dealiased(s.pi, u);
    if (p.a != 0.0) flux -= (p.a / 2.0) * dealias(uxx / lx);
    d.pi = -spectral_deriv(flux, 1);

    auto tangent = [&](const Field& dl, const Field& dpi, Field& out_dl, Field& out_dpi) {
      const Field du = tangent_velocity(dl, dpi, s.pi, lx, lxx);
      const Field dlx = spectral_deriv(dl, 1);
      out_dl = -multiply_dealiased(du, lx) - multiply_dealiased(u, dlx);
      Field dflux = multiply_dealiased(dpi, u) + multiply_dealiased(s.pi, du);
      if (p.a != 0.0) {
        const Field duxx = spectral_deriv(du, 2);
        dflux -= (p.a / 2.0) * dealias(duxx / lx - (uxx * dlx) / (lx * lx));
      }
      out_dpi = -spectral_deriv(dflux, 1);
    };
    tangent(s.v_dl, s.v_dpi, d.v_dl, d.v_dpi);
    tangent(s.w_dl, s.w_dpi, d.w_dl, d.w_dpi);
    return d;
  }
};

}  // namespace

ClebschSimResult clebsch_simulate_with_variations(const ClebschState& init,
                                                  const VariationField& v0,
                                                  const VariationField& w0,
                                                  const FamilyParams& p, double dt,
                                                  double t_end, double mean_u,
                                                  int snap_every) {
  p.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("clebsch_simulate: dt must be > 0");
  const long nsteps = std::lround(t_end / dt);
  const FlowRhs rhs{p, mean_u};

  FlowState s{init.l.displacement(), init.pi, v0.dl, v0.dpi, w0.dl, w0.dpi};

  ClebschSimResult res;
  auto snapshot = [&](double t, const FlowState& st) {
    CircleMap l(st.e);
    require_diffeo(l, "clebsch_simulate");
    Field lx(st.e.grid()), lxx(st.e.grid());
    const Field u = rhs.base_velocity(st.e, st.pi, lx, lxx);
    res.base.times.push_back(t);
    res.base.u.push_back(u);
    res.base.pi.push_back(st.pi);
    res.base.l.push_back(std::move(l));
    res.V.push_back({st.v_dl, rhs.tangent_velocity(st.v_dl, st.v_dpi, st.pi, lx, lxx),
                     st.v_dpi});
    res.W.push_back({st.w_dl, rhs.tangent_velocity(st.w_dl, st.w_dpi, st.pi, lx, lxx),
                     st.w_dpi});
  };

  snapshot(0.0, s);
  for (long k = 0; k < nsteps; ++k) {
    const FlowState k1 = rhs(s);
    const FlowState k2 = rhs(FlowState(s).axpy(dt / 2, k1));
    const FlowState k3 = rhs(FlowState(s).axpy(dt / 2, k2));
    const FlowState k4 = rhs(FlowState(s).axpy(dt, k3));
    s.axpy(dt / 6, k1).axpy(dt / 3, k2).axpy(dt / 3, k3).axpy(dt / 6, k4);
    if (!s.e.finite() || !s.pi.finite())
      throw NumericalBlowup("clebsch_simulate: non-finite state at step " +
                            std::to_string(k));
    if ((k + 1) % snap_every == 0) snapshot((k + 1) * dt, s);
  }
  return res;
}

std::pair<Field, Field> symplectic_density_fields(const CircleMap& l, const Field& u,
                                                  const Field& pi, const VariationField& V,
                                                  const VariationField& W,
                                                  const FamilyParams& p) {
  const Field F = W.dpi * V.dl - W.dl * V.dpi;

  const Field v1x = spectral_deriv(V.dl, 1), w1x = spectral_deriv(W.dl, 1);
  const Field v2x = spectral_deriv(V.du, 1), w2x = spectral_deriv(W.du, 1);
  Field G = -pi * (W.dl * V.du - W.du * V.dl) - u * (W.dl * V.dpi - W.dpi * V.dl) -
            p.beta * (W.du * v2x - w2x * V.du);
  if (p.a != 0.0) {
    const Field lx = l.deriv();
    const Field lxx = l.second_deriv();
    const Field uxx = spectral_deriv(u, 2);
    const Field v1xx = spectral_deriv(V.dl, 2), w1xx = spectral_deriv(W.dl, 2);
    const Field v2xx = spectral_deriv(V.du, 2), w2xx = spectral_deriv(W.du, 2);
    const Field lx2 = lx * lx;
    const double ha = 0.5 * p.a;
    G += (-ha) * ((uxx / lx2) * (W.dl * v1x - w1x * V.dl))
         + ha * ((W.dl * v2xx - w2xx * V.dl) / lx)
         + ha * ((lxx / lx2) * (W.du * v1x - w1x * V.du))
         - ha * ((W.du * v1xx - w1xx * V.du) / lx)
         - ha * ((w1x * v2x - w2x * v1x) / lx);
  }
  return {F, G};
}

std::vector<Field> symplecticity_residual(const ClebschTrajectory& base,
                                          const std::vector<VariationField>& V,
                                          const std::vector<VariationField>& W,
                                          const FamilyParams& p) {
  const size_t nt = base.times.size();
  if (V.size() != nt || W.size() != nt)
    throw std::invalid_argument("symplecticity_residual: trajectory stamp mismatch");
  if (nt < 3) throw std::invalid_argument("symplecticity_residual: need >= 3 snapshots");
  const double dt = base.times[1] - base.times[0];

  std::vector<Field> Fs, Gs;
  for (size_t i = 0; i < nt; ++i) {
    auto [F, G] = symplectic_density_fields(base.l[i], base.u[i], base.pi[i], V[i], W[i], p);
    Fs.push_back(std::move(F));
    Gs.push_back(std::move(G));
  }
  std::vector<Field> out;
  for (size_t i = 1; i + 1 < nt; ++i)
    out.push_back((1.0 / (2.0 * dt)) * (Fs[i + 1] - Fs[i - 1]) + spectral_deriv(Gs[i], 1));
  return out;
}

}  // namespace vb
