// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlcpe/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

namespace hlcpe {

namespace {

constexpr double kPi = std::numbers::pi;

// Clenshaw-Curtis weights for x_j = cos(pi j / n), j = 0..n, on [-1,1].
std::vector<double> clenshaw_curtis(int n) {
  std::vector<double> w(n + 1, 0.0);
  std::vector<double> theta(n + 1);
  for (int j = 0; j <= n; ++j) theta[j] = kPi * j / n;
  std::vector<double> v(n - 1, 1.0);
  if (n % 2 == 0) {
    w[0] = w[n] = 1.0 / (double(n) * n - 1.0);
    for (int k = 1; k < n / 2; ++k)
      for (int j = 1; j < n; ++j) v[j - 1] -= 2.0 * std::cos(2.0 * k * theta[j]) / (4.0 * k * k - 1.0);
    for (int j = 1; j < n; ++j) v[j - 1] -= std::cos(n * theta[j]) / (double(n) * n - 1.0);
  } else {
    w[0] = w[n] = 1.0 / (double(n) * n);
    for (int k = 1; k <= (n - 1) / 2; ++k)
      for (int j = 1; j < n; ++j) v[j - 1] -= 2.0 * std::cos(2.0 * k * theta[j]) / (4.0 * k * k - 1.0);
  }
  for (int j = 1; j < n; ++j) w[j] = 2.0 * v[j - 1] / n;
  return w;
}

}  // namespace

void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = jac(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  x.resize(n);
  w.resize(n);
  for (int k = 0; k < n; ++k) {
    double t = es.eigenvalues()(k);
    double v0 = es.eigenvectors()(0, k);
    x[k] = 0.5 * (a + b) + 0.5 * (b - a) * t;
    w[k] = (b - a) * v0 * v0;
  }
}

Grid::Grid(int nx, int ny, int nz) : nx_(nx), ny_(ny), nz_(nz) {
  if (nx < 4 || ny < 4 || nx % 2 != 0 || ny % 2 != 0)
    throw ResolutionError("horizontal resolution must be even and >= 4, got " + std::to_string(nx) + "x" +
                          std::to_string(ny));
  if (nz < 3) throw ResolutionError("vertical resolution must be >= 3, got " + std::to_string(nz));

  const int n = nz - 1;
  // x_j = cos(pi j/n) written symmetrically; z = (1 - x)/2 = sin^2(pi j/(2n)).
  std::vector<double> xc(nz);
  z_.resize(nz);
  for (int j = 0; j <= n; ++j) {
    xc[j] = std::sin(kPi * (n - 2.0 * j) / (2.0 * n));
    double s = std::sin(kPi * j / (2.0 * n));
    z_[j] = s * s;
  }
  z_[0] = 0.0;
  z_[n] = 1.0;

  // Chebyshev differentiation in x, then d/dz = -2 d/dx.
  Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(nz, nz);
  auto c = [n](int j) { return (j == 0 || j == n) ? 2.0 : 1.0; };
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      double diff = 2.0 * std::sin(kPi * (i + j) / (2.0 * n)) * std::sin(kPi * (j - i) / (2.0 * n));
      double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      dx(i, j) = c(i) / c(j) * sign / diff;
    }
  }
  // negative-sum trick: exact annihilation of constants
  for (int i = 0; i <= n; ++i) {
    double s = 0.0;
    for (int j = 0; j <= n; ++j)
      if (j != i) s += dx(i, j);
    dx(i, i) = -s;
  }
  d_ = -2.0 * dx;

  std::vector<double> wcc = clenshaw_curtis(n);
  w_.resize(nz);
  wv_.resize(nz);
  for (int j = 0; j < nz; ++j) w_[j] = wv_(j) = 0.5 * wcc[j];

  bary_.resize(nz);
  for (int j = 0; j < nz; ++j) bary_[j] = ((j % 2 == 0) ? 1.0 : -1.0) * ((j == 0 || j == n) ? 0.5 : 1.0);

  std::vector<double> gx, gw;
  q_ = Eigen::MatrixXd::Zero(nz, nz);
  for (int i = 1; i < nz; ++i) {
    gauss_legendre(nz, 0.0, z_[i], gx, gw);
    for (std::size_t p = 0; p < gx.size(); ++p) q_.row(i) += gw[p] * lagrange_basis(*this, gx[p]).transpose();
  }

  gauss_legendre(nz + 1, 0.0, 1.0, gx, gw);
  gram_ = Eigen::MatrixXd::Zero(nz, nz);
  for (std::size_t p = 0; p < gx.size(); ++p) {
    Eigen::VectorXd l = lagrange_basis(*this, gx[p]);
    gram_ += gw[p] * l * l.transpose();
  }
}

double Grid::kx(int i) const { return 2.0 * kPi * kx_int(i); }
double Grid::ky(int j) const { return 2.0 * kPi * ky_int(j); }

Eigen::VectorXd lagrange_basis(const Grid& g, double z) {
  const int nz = g.nz();
  Eigen::VectorXd l = Eigen::VectorXd::Zero(nz);
  const auto& bw = g.barycentric();
  double denom = 0.0;
  for (int j = 0; j < nz; ++j) {
    double d = z - g.z(j);
    if (d == 0.0) {
      l.setZero();
      l(j) = 1.0;
      return l;
    }
    l(j) = bw[j] / d;
    denom += l(j);
  }
  return l / denom;
}

double Grid::interpolate_z(const double* column, double z) const {
  Eigen::VectorXd l = lagrange_basis(*this, z);
  double s = 0.0;
  for (int j = 0; j < nz_; ++j) s += l(j) * column[j];
  return s;
}

Grid make_grid(int nx, int ny, int nz) { return Grid(nx, ny, nz); }

namespace {
template <class F>
void require2(const F& f, const Grid& g, const char* what) {
  if (f.nx() != g.nx() || f.ny() != g.ny())
    throw ShapeError(std::string(what) + ": field does not live on the grid");
}
template <class F>
void require3(const F& f, const Grid& g, const char* what) {
  if (f.nx() != g.nx() || f.ny() != g.ny() || f.nz() != g.nz())
    throw ShapeError(std::string(what) + ": field does not live on the grid");
}

template <class T>
BasicField2D<T> vavg(const BasicField3D<T>& f, const Grid& g) {
  require3(f, g, "vertical_average");
  BasicField2D<T> out(f.nx(), f.ny(), f.ncomp());
  const auto& w = g.weights();
  for (int c = 0; c < f.ncomp(); ++c)
    for (int i = 0; i < f.nx(); ++i)
      for (int j = 0; j < f.ny(); ++j) {
        const T* col = f.column(c, i, j);
        T s{};
        for (int k = 0; k < f.nz(); ++k) s += w[k] * col[k];
        out(c, i, j) = s;
      }
  return out;
}

template <class T>
BasicField3D<T> apply_vert(const Eigen::MatrixXd& m, const BasicField3D<T>& f) {
  if (m.cols() != f.nz() || m.rows() != f.nz()) throw ShapeError("apply_vertical: matrix size mismatch");
  BasicField3D<T> out(f.nx(), f.ny(), f.nz(), f.ncomp());
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::Map<const Mat> in(f.values().data(), f.nz(), Eigen::Index(f.columns()));
  Eigen::Map<Mat> res(out.values().data(), f.nz(), Eigen::Index(f.columns()));
  res.noalias() = m.cast<T>() * in;
  return out;
}
}  // namespace

void require_on_grid(const Field2D& f, const Grid& g, const char* what) { require2(f, g, what); }
void require_on_grid(const Field3D& f, const Grid& g, const char* what) { require3(f, g, what); }
void require_on_grid(const CField2D& f, const Grid& g, const char* what) { require2(f, g, what); }
void require_on_grid(const CField3D& f, const Grid& g, const char* what) { require3(f, g, what); }

Field2D vertical_average(const Field3D& f, const Grid& g) { return vavg(f, g); }
CField2D vertical_average(const CField3D& f, const Grid& g) { return vavg(f, g); }

Field3D apply_vertical(const Eigen::MatrixXd& m, const Field3D& f) { return apply_vert(m, f); }
CField3D apply_vertical(const Eigen::MatrixXd& m, const CField3D& f) { return apply_vert(m, f); }

Field3D vertical_derivative(const Field3D& f, const Grid& g) {
  require3(f, g, "vertical_derivative");
  return apply_vert(g.dz(), f);
}

Field3D vertical_integral(const Field3D& f, const Grid& g) {
  require3(f, g, "vertical_integral");
  return apply_vert(g.integration(), f);
}

Field3D extrude(const Field2D& f, const Grid& g) {
  require2(f, g, "extrude");
  Field3D out(f.nx(), f.ny(), g.nz(), f.ncomp());
  for (int c = 0; c < f.ncomp(); ++c)
    for (int i = 0; i < f.nx(); ++i)
      for (int j = 0; j < f.ny(); ++j) {
        double* col = out.column(c, i, j);
        for (int k = 0; k < g.nz(); ++k) col[k] = f(c, i, j);
      }
  return out;
}

Field3D multiply(const Field3D& s, const Field3D& f) {
  if (s.ncomp() != 1 || s.nx() != f.nx() || s.ny() != f.ny() || s.nz() != f.nz())
    throw ShapeError("multiply: scalar field shape mismatch");
  Field3D out = f;
  const std::size_t block = s.size();
  for (int c = 0; c < f.ncomp(); ++c)
    for (std::size_t n = 0; n < block; ++n) out[c * block + n] *= s[n];
  return out;
}

Field2D multiply(const Field2D& s, const Field2D& f) {
  if (s.ncomp() != 1 || s.nx() != f.nx() || s.ny() != f.ny())
    throw ShapeError("multiply: scalar field shape mismatch");
  Field2D out = f;
  const std::size_t block = s.size();
  for (int c = 0; c < f.ncomp(); ++c)
    for (std::size_t n = 0; n < block; ++n) out[c * block + n] *= s[n];
  return out;
}

double max_abs(const Field2D& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}
double max_abs(const Field3D& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}
bool all_finite(const Field2D& f) {
  for (double v : f.values())
    if (!std::isfinite(v)) return false;
  return true;
}
bool all_finite(const Field3D& f) {
  for (double v : f.values())
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace hlcpe
