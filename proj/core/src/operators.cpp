// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlcpe/operators.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "hlcpe/spectral.hpp"

namespace hlcpe {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(const Field2D& xi0) {
  if (xi0.ncomp() != 1) throw ShapeError("xi0 must be a scalar field");
  for (double v : xi0.values())
    if (!(v > 0.0)) throw DomainError("xi0 must be positive");
}

template <class Fn>
LameCoefficients build(const Field2D& xi0, const Grid& grid, Fn&& fill) {
  require_on_grid(xi0, grid, "LameCoefficients");
  require_positive(xi0);
  LameCoefficients c;
  c.h = Field3D(grid.nx(), grid.ny(), grid.nz(), 1);
  c.g = Field3D(grid.nx(), grid.ny(), grid.nz(), 1);
  c.beta.assign(grid.nz(), 1.0);
  for (int i = 0; i < grid.nx(); ++i)
    for (int j = 0; j < grid.ny(); ++j)
      for (int k = 0; k < grid.nz(); ++k) fill(grid.z(k), xi0(0, i, j), c.h(0, i, j, k), c.g(0, i, j, k));
  return c;
}

// Vertical block D diag(beta) D.
Eigen::MatrixXd vertical_block(const Grid& g, const std::vector<double>& beta) {
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(beta.data(), Eigen::Index(beta.size()));
  return g.dz() * b.asDiagonal() * g.dz();
}

}  // namespace

LameCoefficients LameCoefficients::hydrostatic(const Field2D& xi0, const Grid& grid) {
  auto c = build(xi0, grid, [](double z, double x, double& h, double& g) {
    h = a(z, x);
    g = 1.0 / x;
  });
  for (int k = 0; k < grid.nz(); ++k) c.beta[k] = (1.0 - kDelta * grid.z(k)) / (kDelta * kDelta);
  return c;
}

LameCoefficients LameCoefficients::hydrostatic(double xi_bar, const Grid& grid) {
  return hydrostatic(Field2D(grid.nx(), grid.ny(), 1, xi_bar), grid);
}

LameCoefficients LameCoefficients::gamma2(const Field2D& xi0, const Grid& grid) {
  return build(xi0, grid, [](double z, double x, double& h, double& g) { h = g = 1.0 / (x + 0.5 * z); });
}

LameCoefficients LameCoefficients::isotropic(const Field2D& xi0, const Grid& grid) {
  return build(xi0, grid, [](double, double x, double& h, double& g) { h = g = 1.0 / x; });
}

LameCoefficients LameCoefficients::for_model(Model m, const Field2D& xi0, const Grid& grid) {
  switch (m) {
    case Model::Gamma1: return hydrostatic(xi0, grid);
    case Model::Gamma2: return gamma2(xi0, grid);
    case Model::GeneralNoGravity: return isotropic(xi0, grid);
  }
  throw DomainError("unknown model");
}

VerticalProfile VerticalProfile::horizontal_mean(const LameCoefficients& c) {
  VerticalProfile p;
  const int nz = c.h.nz();
  p.h.assign(nz, 0.0);
  p.g.assign(nz, 0.0);
  p.beta = c.beta;
  const double inv = 1.0 / (double(c.h.nx()) * c.h.ny());
  for (int i = 0; i < c.h.nx(); ++i)
    for (int j = 0; j < c.h.ny(); ++j)
      for (int k = 0; k < nz; ++k) {
        p.h[k] += inv * c.h(0, i, j, k);
        p.g[k] += inv * c.g(0, i, j, k);
      }
  return p;
}

Eigen::VectorXd LinearOperator::apply(const Eigen::VectorXd& x) const {
  if (x.size() != n_) throw ShapeError("LinearOperator::apply: size mismatch");
  return apply_(x);
}

const Eigen::MatrixXd& LinearOperator::dense() const {
  if (!dense_) throw ResolutionError("operator has no dense realization");
  return *dense_;
}

bool dense_allowed(const Grid& g) { return g.nx() <= 8 && g.ny() <= 8 && g.nz() <= 9; }

Field3D lame_expression(const Field3D& v, const LameCoefficients& c, const Grid& g, const PhysicalParams& p) {
  require_on_grid(v, g, "apply_lame");
  if (v.ncomp() != 2) throw ShapeError("apply_lame expects a 2-vector field");
  const int nz = g.nz();
  CField3D hat = fft(v);
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      const cplx sx = g.dx_symbol(i), sy = g.dy_symbol(j);
      const double sxx = g.dxx_symbol(i), syy = g.dyy_symbol(j), lap = sxx + syy;
      for (int k = 0; k < nz; ++k) {
        const cplx a0 = hat(0, i, j, k), a1 = hat(1, i, j, k);
        hat(0, i, j, k) = p.mu * lap * a0 + p.mu_prime * (sxx * a0 + sx * sy * a1);
        hat(1, i, j, k) = p.mu * lap * a1 + p.mu_prime * (sx * sy * a0 + syy * a1);
      }
    }
  Field3D out = ifft_real(hat);
  Field3D flux = apply_vertical(g.dz(), v);
  for (std::size_t col = 0; col < flux.columns(); ++col)
    for (int k = 0; k < nz; ++k) flux[col * nz + k] *= c.beta[k];
  Field3D vert = apply_vertical(g.dz(), flux);
  for (std::size_t col = 0; col < out.columns(); ++col) {
    const std::size_t cell = col % (std::size_t(g.nx()) * g.ny());
    for (int k = 0; k < nz; ++k) {
      const std::size_t n = col * nz + k, s = cell * nz + k;
      out[n] = c.h[s] * out[n] + p.mu * c.g[s] * vert[n];
    }
  }
  return out;
}

Field3D apply_lame(const Field3D& v, const LameCoefficients& c, const Grid& g, const PhysicalParams& p) {
  Field3D out = lame_expression(v, c, g, p);
  const auto& d = g.dz();
  const int nz = g.nz();
  for (std::size_t col = 0; col < out.columns(); ++col) {
    const double* x = v.values().data() + col * nz;
    out[col * nz + nz - 1] = x[nz - 1];
    double s = 0.0;
    for (int k = 0; k < nz; ++k) s += d(0, k) * x[k];
    out[col * nz] = s;
  }
  return out;
}

CField3D apply_lame(const CField3D& v, const LameCoefficients& c, const Grid& g, const PhysicalParams& p) {
  Field3D re(v.nx(), v.ny(), v.nz(), v.ncomp()), im(v.nx(), v.ny(), v.nz(), v.ncomp());
  for (std::size_t n = 0; n < v.size(); ++n) {
    re[n] = v[n].real();
    im[n] = v[n].imag();
  }
  Field3D ar = apply_lame(re, c, g, p), ai = apply_lame(im, c, g, p);
  CField3D out(v.nx(), v.ny(), v.nz(), v.ncomp());
  for (std::size_t n = 0; n < v.size(); ++n) out[n] = cplx(ar[n], ai[n]);
  return out;
}

Field3D apply_hydrostatic_lame(const Field3D& v, const Field2D& xi0, const Grid& g, const PhysicalParams& p) {
  return apply_lame(v, LameCoefficients::hydrostatic(xi0, g), g, p);
}

ChsState apply_chs(const ChsState& s, double xi_bar, const Grid& g, const PhysicalParams& p) {
  if (!(xi_bar > 0.0)) throw DomainError("xi_bar must be positive");
  require_on_grid(s.zeta, g, "apply_chs");
  require_on_grid(s.v, g, "apply_chs");
  ChsState out;
  out.zeta = divergence(vertical_average(s.v, g), g);
  out.zeta *= -xi_bar;
  out.v = apply_lame(s.v, LameCoefficients::hydrostatic(xi_bar, g), g, p);
  Field2D grad = gradient(s.zeta, g);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < g.nx(); ++i)
      for (int j = 0; j < g.ny(); ++j)
        for (int k = 1; k < g.nz() - 1; ++k) out.v(c, i, j, k) -= grad(c, i, j);
  return out;
}

namespace {
template <class T>
BasicField3D<T> project_impl(const BasicField3D<T>& v, const Grid& g) {
  require_on_grid(v, g, "project_boundary");
  BasicField3D<T> out = v;
  const int nz = g.nz();
  const auto& d = g.dz();
  for (std::size_t col = 0; col < out.columns(); ++col) {
    T* x = out.values().data() + col * nz;
    x[nz - 1] = T{};
    T s{};
    for (int k = 1; k < nz; ++k) s += d(0, k) * x[k];
    x[0] = -s / d(0, 0);
  }
  return out;
}
}  // namespace

Field3D project_boundary(const Field3D& v, const Grid& g) { return project_impl(v, g); }
CField3D project_boundary(const CField3D& v, const Grid& g) { return project_impl(v, g); }

Eigen::MatrixXd lift_matrix(const Grid& g) {
  const int nz = g.nz(), m = nz - 2;
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(nz, m);
  for (int q = 0; q < m; ++q) {
    e(q + 1, q) = 1.0;
    e(0, q) = -g.dz()(0, q + 1) / g.dz()(0, 0);
  }
  return e;
}

Eigen::MatrixXd fourier_d1(int n) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      int m = i - j;
      double sign = (std::abs(m) % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = kPi * sign / std::tan(kPi * m / n);
    }
  return d;
}

Eigen::MatrixXd fourier_d2(int n) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  const double h = 2.0 * kPi / n;
  const double scale = 4.0 * kPi * kPi;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        d(i, j) = scale * (-kPi * kPi / (3.0 * h * h) - 1.0 / 6.0);
      } else {
        int m = i - j;
        double sign = (std::abs(m) % 2 == 0) ? 1.0 : -1.0;
        double s = std::sin(0.5 * m * h);
        d(i, j) = scale * (-sign / (2.0 * s * s));
      }
    }
  return d;
}

Eigen::MatrixXd assemble_lame_dense(const LameCoefficients& c, const Grid& g, const PhysicalParams& p) {
  if (!dense_allowed(g)) throw ResolutionError("resolution too large for a dense realization");
  const int nx = g.nx(), ny = g.ny(), nz = g.nz();
  const Eigen::Index n = Eigen::Index(2) * nx * ny * nz;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd d1x = fourier_d1(nx), d1y = fourier_d1(ny), d2x = fourier_d2(nx), d2y = fourier_d2(ny);
  const Eigen::MatrixXd vert = vertical_block(g, c.beta);
  auto idx = [&](int comp, int i, int j, int k) { return ((Eigen::Index(comp) * nx + i) * ny + j) * nz + k; };

  for (int comp = 0; comp < 2; ++comp)
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) {
        a(idx(comp, i, j, nz - 1), idx(comp, i, j, nz - 1)) = 1.0;
        for (int kk = 0; kk < nz; ++kk) a(idx(comp, i, j, 0), idx(comp, i, j, kk)) = g.dz()(0, kk);
        for (int k = 1; k < nz - 1; ++k) {
          const Eigen::Index row = idx(comp, i, j, k);
          const double h = c.h(0, i, j, k), gv = c.g(0, i, j, k);
          for (int ii = 0; ii < nx; ++ii) a(row, idx(comp, ii, j, k)) += h * p.mu * d2x(i, ii);
          for (int jj = 0; jj < ny; ++jj) a(row, idx(comp, i, jj, k)) += h * p.mu * d2y(j, jj);
          if (comp == 0)
            for (int ii = 0; ii < nx; ++ii) a(row, idx(0, ii, j, k)) += h * p.mu_prime * d2x(i, ii);
          else
            for (int jj = 0; jj < ny; ++jj) a(row, idx(1, i, jj, k)) += h * p.mu_prime * d2y(j, jj);
          const int other = 1 - comp;
          for (int ii = 0; ii < nx; ++ii)
            for (int jj = 0; jj < ny; ++jj) a(row, idx(other, ii, jj, k)) += h * p.mu_prime * d1x(i, ii) * d1y(j, jj);
          for (int kk = 0; kk < nz; ++kk) a(row, idx(comp, i, j, kk)) += gv * p.mu * vert(k, kk);
        }
      }
  return a;
}

Eigen::MatrixXd assemble_chs_dense(double xi_bar, const Grid& g, const PhysicalParams& p) {
  if (!dense_allowed(g)) throw ResolutionError("resolution too large for a dense realization");
  const int nx = g.nx(), ny = g.ny(), nz = g.nz();
  const Eigen::Index nh = Eigen::Index(nx) * ny, nv = 2 * nh * nz;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nh + nv, nh + nv);
  a.bottomRightCorner(nv, nv) = assemble_lame_dense(LameCoefficients::hydrostatic(xi_bar, g), g, p);
  const Eigen::MatrixXd d1x = fourier_d1(nx), d1y = fourier_d1(ny);
  const auto& w = g.weights();
  auto vidx = [&](int comp, int i, int j, int k) { return nh + ((Eigen::Index(comp) * nx + i) * ny + j) * nz + k; };
  auto zidx = [&](int i, int j) { return Eigen::Index(i) * ny + j; };
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const Eigen::Index row = zidx(i, j);
      for (int k = 0; k < nz; ++k) {
        for (int ii = 0; ii < nx; ++ii) a(row, vidx(0, ii, j, k)) += -xi_bar * w[k] * d1x(i, ii);
        for (int jj = 0; jj < ny; ++jj) a(row, vidx(1, i, jj, k)) += -xi_bar * w[k] * d1y(j, jj);
      }
      for (int k = 1; k < nz - 1; ++k) {
        for (int ii = 0; ii < nx; ++ii) a(vidx(0, i, j, k), zidx(ii, j)) += -d1x(i, ii);
        for (int jj = 0; jj < ny; ++jj) a(vidx(1, i, j, k), zidx(i, jj)) += -d1y(j, jj);
      }
    }
  return a;
}

Eigen::VectorXd pack(const ChsState& s) {
  Eigen::VectorXd x(Eigen::Index(s.zeta.size() + s.v.size()));
  for (std::size_t n = 0; n < s.zeta.size(); ++n) x(Eigen::Index(n)) = s.zeta[n];
  for (std::size_t n = 0; n < s.v.size(); ++n) x(Eigen::Index(s.zeta.size() + n)) = s.v[n];
  return x;
}

ChsState unpack_chs(const Eigen::VectorXd& x, const Grid& g) {
  ChsState s{Field2D(g.nx(), g.ny(), 1), Field3D(g.nx(), g.ny(), g.nz(), 2)};
  if (std::size_t(x.size()) != s.zeta.size() + s.v.size()) throw ShapeError("unpack_chs: size mismatch");
  for (std::size_t n = 0; n < s.zeta.size(); ++n) s.zeta[n] = x(Eigen::Index(n));
  for (std::size_t n = 0; n < s.v.size(); ++n) s.v[n] = x(Eigen::Index(s.zeta.size() + n));
  return s;
}

LinearOperator assemble_hydrostatic_lame(const Field2D& xi0, const Grid& g, const PhysicalParams& p, bool want_dense) {
  LameCoefficients c = LameCoefficients::hydrostatic(xi0, g);
  std::optional<Eigen::MatrixXd> dense;
  if (want_dense) dense = assemble_lame_dense(c, g, p);
  const Eigen::Index n = Eigen::Index(2) * g.nx() * g.ny() * g.nz();
  auto apply = [c, g, p](const Eigen::VectorXd& x) {
    Field3D v(g.nx(), g.ny(), g.nz(), 2);
    std::copy(x.data(), x.data() + x.size(), v.values().begin());
    Field3D r = apply_lame(v, c, g, p);
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(r.values().data(), x.size()));
  };
  return LinearOperator(n, apply, std::move(dense));
}

LinearOperator assemble_chs(double xi_bar, const Grid& g, const PhysicalParams& p, bool want_dense) {
  if (!(xi_bar > 0.0)) throw DomainError("xi_bar must be positive");
  std::optional<Eigen::MatrixXd> dense;
  if (want_dense) dense = assemble_chs_dense(xi_bar, g, p);
  const Eigen::Index n = Eigen::Index(g.nx()) * g.ny() * (1 + 2 * g.nz());
  auto apply = [xi_bar, g, p](const Eigen::VectorXd& x) { return pack(apply_chs(unpack_chs(x, g), xi_bar, g, p)); };
  return LinearOperator(n, apply, std::move(dense));
}

Eigen::MatrixXcd mode_lame_block(const Grid& g, const VerticalProfile& prof, const PhysicalParams& p, int i, int j) {
  const int nz = g.nz(), m = nz - 2;
  const Eigen::MatrixXd e = lift_matrix(g);
  const Eigen::MatrixXd vert = vertical_block(g, prof.beta);
  const cplx sx = g.dx_symbol(i), sy = g.dy_symbol(j);
  const double sxx = g.dxx_symbol(i), syy = g.dyy_symbol(j);
  const cplx s[2][2] = {{sxx, sx * sy}, {sx * sy, syy}};
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
  for (int c = 0; c < 2; ++c)
    for (int d = 0; d < 2; ++d) {
      Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(nz, nz);
      for (int k = 0; k < nz; ++k) {
        full(k, k) += prof.h[k] * p.mu_prime * s[c][d];
        if (c == d) {
          full(k, k) += prof.h[k] * p.mu * (sxx + syy);
          for (int kk = 0; kk < nz; ++kk) full(k, kk) += prof.g[k] * p.mu * vert(k, kk);
        }
      }
      out.block(c * m, d * m, m, m) = (full * e.cast<cplx>()).middleRows(1, m);
    }
  return out;
}

Eigen::MatrixXcd mode_chs_block(const Grid& g, const VerticalProfile& prof, const PhysicalParams& p, double xi_bar,
                                double pscale, int i, int j) {
  const int m = g.nz() - 2;
  const Eigen::MatrixXd e = lift_matrix(g);
  const Eigen::RowVectorXd avg = g.weight_vector().transpose() * e;
  const cplx s1[2] = {g.dx_symbol(i), g.dy_symbol(j)};
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(1 + 2 * m, 1 + 2 * m);
  out.bottomRightCorner(2 * m, 2 * m) = mode_lame_block(g, prof, p, i, j);
  for (int c = 0; c < 2; ++c) {
    out.block(0, 1 + c * m, 1, m) = (-xi_bar * s1[c]) * avg.cast<cplx>();
    out.block(1 + c * m, 0, m, 1).setConstant(-pscale * s1[c]);
  }
  return out;
}

SymbolEigs lame_symbol_eigs(int kx, int ky, double mu, double mu_prime) {
  const double k1 = 2.0 * kPi * kx, k2 = 2.0 * kPi * ky, kk = k1 * k1 + k2 * k2;
  SymbolEigs s;
  s.lambda1 = (mu + mu_prime) * kk;
  s.lambda2 = mu * kk;
  s.symbol << mu * kk + mu_prime * k1 * k1, mu_prime * k1 * k2, mu_prime * k1 * k2, mu * kk + mu_prime * k2 * k2;
  return s;
}

EllipticityReport symbol_ellipticity_report(double mu, double mu_prime, int kmax) {
  EllipticityReport r;
  r.min_lambda1 = r.min_lambda2 = std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (int kx = -kmax; kx <= kmax; ++kx)
    for (int ky = -kmax; ky <= kmax; ++ky) {
      if ((kx == 0 && ky == 0) || kx * kx + ky * ky > kmax * kmax) continue;
      SymbolEigs s = lame_symbol_eigs(kx, ky, mu, mu_prime);
      r.min_lambda1 = std::min(r.min_lambda1, s.lambda1);
      r.min_lambda2 = std::min(r.min_lambda2, s.lambda2);
      double m = std::min(s.lambda1, s.lambda2);
      if (m < best) {
        best = m;
        r.argmin_kx = kx;
        r.argmin_ky = ky;
      }
    }
  r.min_b1 = std::numeric_limits<double>::infinity();
  for (int n = 0; n <= 100; ++n) r.min_b1 = std::min(r.min_b1, LameCoefficients::b1(n / 100.0));
  const double b1_floor = std::exp(-2.0) / (kDelta * kDelta);
  const bool sym_ok = r.min_lambda1 > 0.0 && r.min_lambda2 > 0.0;
  const bool b1_ok = r.min_b1 >= b1_floor * (1.0 - 1e-12) && r.min_b1 > 0.0;
  r.ok = sym_ok && b1_ok;
  if (r.ok) {
    r.explanation = "all symbol eigenvalues positive for 0 < |k| <= " + std::to_string(kmax);
  } else if (!(mu > 0.0)) {
    r.explanation = "mu <= 0: lambda2 = mu |k|^2 is not positive";
  } else if (!sym_ok) {
    r.explanation = "mu + mu' <= 0: lambda1 = (mu + mu')|k|^2 is not positive";
  } else {
    r.explanation = "vertical coefficient b1 below its lower bound";
  }
  return r;
}

void write_matrix_market(const Eigen::MatrixXd& m, const std::string& path, const std::string& comment) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os.precision(17);
  Eigen::Index nnz = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) ++nnz;
  os << "%%MatrixMarket matrix coordinate real general\n";
  if (!comment.empty()) os << "% " << comment << "\n";
  os << m.rows() << " " << m.cols() << " " << nnz << "\n";
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) os << i + 1 << " " << j + 1 << " " << m(i, j) << "\n";
}

}  // namespace hlcpe
