// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "hlcpe/error.hpp"

namespace hlcpe {

using cplx = std::complex<double>;

/// Values on the Nx x Ny horizontal grid; component c, node (i,j) lives at
/// (c*Nx + i)*Ny + j.
template <class T>
class BasicField2D {
 public:
  using value_type = T;

  BasicField2D() = default;
  BasicField2D(int nx, int ny, int ncomp, T fill = T{})
      : nx_(nx), ny_(ny), nc_(ncomp), data_(std::size_t(nx) * ny * ncomp, fill) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int ncomp() const { return nc_; }
  std::size_t size() const { return data_.size(); }
  std::size_t slice_size() const { return std::size_t(nx_) * ny_; }

  T& operator()(int c, int i, int j) { return data_[(std::size_t(c) * nx_ + i) * ny_ + j]; }
  const T& operator()(int c, int i, int j) const { return data_[(std::size_t(c) * nx_ + i) * ny_ + j]; }
  T& operator[](std::size_t n) { return data_[n]; }
  const T& operator[](std::size_t n) const { return data_[n]; }

  T* comp(int c) { return data_.data() + std::size_t(c) * slice_size(); }
  const T* comp(int c) const { return data_.data() + std::size_t(c) * slice_size(); }
  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

  bool same_shape(const BasicField2D& o) const { return nx_ == o.nx_ && ny_ == o.ny_ && nc_ == o.nc_; }

  BasicField2D& operator+=(const BasicField2D& o) {
    check(o);
    for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += o.data_[n];
    return *this;
  }
  BasicField2D& operator-=(const BasicField2D& o) {
    check(o);
    for (std::size_t n = 0; n < data_.size(); ++n) data_[n] -= o.data_[n];
    return *this;
  }
  BasicField2D& operator*=(T s) {
    for (auto& x : data_) x *= s;
    return *this;
  }
  // this += s*o
  BasicField2D& axpy(T s, const BasicField2D& o) {
    check(o);
    for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += s * o.data_[n];
    return *this;
  }

 private:
  void check(const BasicField2D& o) const {
    if (!same_shape(o)) throw ShapeError("Field2D shape mismatch");
  }

  int nx_ = 0, ny_ = 0, nc_ = 0;
  std::vector<T> data_;
};

/// Values on Nx x Ny x Nz; component c, node (i,j,k) lives at
/// ((c*Nx + i)*Ny + j)*Nz + k so that vertical columns are contiguous.
template <class T>
class BasicField3D {
 public:
  using value_type = T;

  BasicField3D() = default;
  BasicField3D(int nx, int ny, int nz, int ncomp, T fill = T{})
      : nx_(nx), ny_(ny), nz_(nz), nc_(ncomp), data_(std::size_t(nx) * ny * nz * ncomp, fill) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  int ncomp() const { return nc_; }
  std::size_t size() const { return data_.size(); }
  std::size_t columns() const { return std::size_t(nc_) * nx_ * ny_; }

  std::size_t index(int c, int i, int j, int k) const {
    return ((std::size_t(c) * nx_ + i) * ny_ + j) * nz_ + k;
  }
  T& operator()(int c, int i, int j, int k) { return data_[index(c, i, j, k)]; }
  const T& operator()(int c, int i, int j, int k) const { return data_[index(c, i, j, k)]; }
  T& operator[](std::size_t n) { return data_[n]; }
  const T& operator[](std::size_t n) const { return data_[n]; }

  T* column(int c, int i, int j) { return data_.data() + index(c, i, j, 0); }
  const T* column(int c, int i, int j) const { return data_.data() + index(c, i, j, 0); }
  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

  bool same_shape(const BasicField3D& o) const {
    return nx_ == o.nx_ && ny_ == o.ny_ && nz_ == o.nz_ && nc_ == o.nc_;
  }

  BasicField3D& operator+=(const BasicField3D& o) {
    check(o);
    for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += o.data_[n];
    return *this;
  }
  BasicField3D& operator-=(const BasicField3D& o) {
    check(o);
    for (std::size_t n = 0; n < data_.size(); ++n) data_[n] -= o.data_[n];
    return *this;
  }
  BasicField3D& operator*=(T s) {
    for (auto& x : data_) x *= s;
    return *this;
  }
  BasicField3D& axpy(T s, const BasicField3D& o) {
    check(o);
    for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += s * o.data_[n];
    return *this;
  }

 private:
  void check(const BasicField3D& o) const {
    if (!same_shape(o)) throw ShapeError("Field3D shape mismatch");
  }

  int nx_ = 0, ny_ = 0, nz_ = 0, nc_ = 0;
  std::vector<T> data_;
};

using Field2D = BasicField2D<double>;
using Field3D = BasicField3D<double>;
using CField2D = BasicField2D<cplx>;
using CField3D = BasicField3D<cplx>;

template <class T>
BasicField2D<T> operator+(BasicField2D<T> a, const BasicField2D<T>& b) { return a += b; }
template <class T>
BasicField2D<T> operator-(BasicField2D<T> a, const BasicField2D<T>& b) { return a -= b; }
template <class T>
BasicField2D<T> operator*(T s, BasicField2D<T> a) { return a *= s; }
template <class T>
BasicField3D<T> operator+(BasicField3D<T> a, const BasicField3D<T>& b) { return a += b; }
template <class T>
BasicField3D<T> operator-(BasicField3D<T> a, const BasicField3D<T>& b) { return a -= b; }
template <class T>
BasicField3D<T> operator*(T s, BasicField3D<T> a) { return a *= s; }

/// Periodic unit square times (0,1): Fourier in x,y and Chebyshev-Gauss-Lobatto
/// collocation in z with z_0 = 0 (bottom) and z_{Nz-1} = 1 (top).
class Grid {
 public:
  Grid(int nx, int ny, int nz);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  std::size_t horizontal_nodes() const { return std::size_t(nx_) * ny_; }
  std::size_t nodes() const { return horizontal_nodes() * nz_; }

  double x(int i) const { return double(i) / nx_; }
  double y(int j) const { return double(j) / ny_; }
  double z(int k) const { return z_[k]; }
  const std::vector<double>& z() const { return z_; }

  // Clenshaw-Curtis weights on [0,1]; they sum to 1.
  const std::vector<double>& weights() const { return w_; }
  const Eigen::VectorXd& weight_vector() const { return wv_; }
  // d/dz on the collocation nodes.
  const Eigen::MatrixXd& dz() const { return d_; }
  // (Q f)_k = integral from 0 to z_k of the interpolant of f.
  const Eigen::MatrixXd& integration() const { return q_; }
  // Exact Gram matrix of the Lagrange basis, M_ij = int_0^1 l_i l_j dz.
  const Eigen::MatrixXd& gram() const { return gram_; }
  // Barycentric weights of the vertical nodes.
  const std::vector<double>& barycentric() const { return bary_; }

  // Signed integer wavenumber of FFT index i, in (-N/2, N/2].
  int kx_int(int i) const { return signed_wavenumber(i, nx_); }
  int ky_int(int j) const { return signed_wavenumber(j, ny_); }
  // Multiplier 2*pi*k of FFT index i.
  double kx(int i) const;
  double ky(int j) const;
  bool nyquist_x(int i) const { return 2 * i == nx_; }
  bool nyquist_y(int j) const { return 2 * j == ny_; }
  // Symbols of d/dx (Nyquist removed) and d^2/dx^2 (Nyquist kept).
  cplx dx_symbol(int i) const { return nyquist_x(i) ? cplx(0.0) : cplx(0.0, kx(i)); }
  cplx dy_symbol(int j) const { return nyquist_y(j) ? cplx(0.0) : cplx(0.0, ky(j)); }
  double dxx_symbol(int i) const { return -kx(i) * kx(i); }
  double dyy_symbol(int j) const { return -ky(j) * ky(j); }

  // Interpolate nodal column values to an arbitrary z in [0,1].
  double interpolate_z(const double* column, double z) const;

  static int signed_wavenumber(int i, int n) { return (2 * i <= n) ? i : i - n; }

 private:
  int nx_, ny_, nz_;
  std::vector<double> z_, w_, bary_;
  Eigen::VectorXd wv_;
  Eigen::MatrixXd d_, q_, gram_;
};

Grid make_grid(int nx, int ny, int nz);

// Gauss-Legendre rule with n points on [a,b].
void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

// Lagrange basis values l_j(z) on the grid's vertical nodes.
Eigen::VectorXd lagrange_basis(const Grid& g, double z);

template <class T>
BasicField3D<T> make_field3d(const Grid& g, int ncomp, T fill = T{}) {
  return BasicField3D<T>(g.nx(), g.ny(), g.nz(), ncomp, fill);
}
template <class T>
BasicField2D<T> make_field2d(const Grid& g, int ncomp, T fill = T{}) {
  return BasicField2D<T>(g.nx(), g.ny(), ncomp, fill);
}

void require_on_grid(const Field2D& f, const Grid& g, const char* what);
void require_on_grid(const Field3D& f, const Grid& g, const char* what);
void require_on_grid(const CField2D& f, const Grid& g, const char* what);
void require_on_grid(const CField3D& f, const Grid& g, const char* what);

/// Sum_j w_j f(., ., z_j).
Field2D vertical_average(const Field3D& f, const Grid& g);
CField2D vertical_average(const CField3D& f, const Grid& g);

/// Apply an Nz x Nz matrix to every vertical column.
Field3D apply_vertical(const Eigen::MatrixXd& m, const Field3D& f);
CField3D apply_vertical(const Eigen::MatrixXd& m, const CField3D& f);

Field3D vertical_derivative(const Field3D& f, const Grid& g);
Field3D vertical_integral(const Field3D& f, const Grid& g);

/// Broadcast a 2D field to every vertical level.
Field3D extrude(const Field2D& f, const Grid& g);

/// Pointwise helpers.
Field3D multiply(const Field3D& scalar, const Field3D& f);
Field2D multiply(const Field2D& scalar, const Field2D& f);

double max_abs(const Field2D& f);
double max_abs(const Field3D& f);
bool all_finite(const Field2D& f);
bool all_finite(const Field3D& f);

}  // namespace hlcpe
