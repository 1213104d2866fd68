// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlcpe/spectral.hpp"

#include <type_traits>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace hlcpe {

namespace {

Eigen::FFT<double>& engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

// In-place 2D transform of an nx*ny slice addressed as base[(i*ny + j)*stride].
void transform_slice(int nx, int ny, cplx* base, std::ptrdiff_t stride, bool forward) {
  auto& e = engine();
  std::vector<cplx> a(std::max(nx, ny)), b(std::max(nx, ny));
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) a[j] = base[(std::ptrdiff_t(i) * ny + j) * stride];
    if (forward)
      e.fwd(b.data(), a.data(), ny);
    else
      e.inv(b.data(), a.data(), ny);
    for (int j = 0; j < ny; ++j) base[(std::ptrdiff_t(i) * ny + j) * stride] = b[j];
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) a[i] = base[(std::ptrdiff_t(i) * ny + j) * stride];
    if (forward)
      e.fwd(b.data(), a.data(), nx);
    else
      e.inv(b.data(), a.data(), nx);
    for (int i = 0; i < nx; ++i) base[(std::ptrdiff_t(i) * ny + j) * stride] = b[i];
  }
}

template <class T>
CField2D to_complex(const BasicField2D<T>& f) {
  CField2D out(f.nx(), f.ny(), f.ncomp());
  for (std::size_t n = 0; n < f.size(); ++n) out[n] = cplx(f[n]);
  return out;
}
template <class T>
CField3D to_complex(const BasicField3D<T>& f) {
  CField3D out(f.nx(), f.ny(), f.nz(), f.ncomp());
  for (std::size_t n = 0; n < f.size(); ++n) out[n] = cplx(f[n]);
  return out;
}

void transform(CField2D& f, bool forward) {
  for (int c = 0; c < f.ncomp(); ++c) transform_slice(f.nx(), f.ny(), f.comp(c), 1, forward);
}
void transform(CField3D& f, bool forward) {
  for (int c = 0; c < f.ncomp(); ++c)
    for (int k = 0; k < f.nz(); ++k) transform_slice(f.nx(), f.ny(), &f(c, 0, 0, k), f.nz(), forward);
}

Field2D real_part(const CField2D& f) {
  Field2D out(f.nx(), f.ny(), f.ncomp());
  for (std::size_t n = 0; n < f.size(); ++n) out[n] = f[n].real();
  return out;
}
Field3D real_part(const CField3D& f) {
  Field3D out(f.nx(), f.ny(), f.nz(), f.ncomp());
  for (std::size_t n = 0; n < f.size(); ++n) out[n] = f[n].real();
  return out;
}

template <class T>
BasicField2D<T> pick(const BasicField2D<T>& f, int c) {
  BasicField2D<T> out(f.nx(), f.ny(), 1);
  std::copy(f.comp(c), f.comp(c) + f.slice_size(), out.comp(0));
  return out;
}

}  // namespace

CField2D fft(const Field2D& f) {
  CField2D h = to_complex(f);
  transform(h, true);
  return h;
}
CField2D fft(const CField2D& f) {
  CField2D h = f;
  transform(h, true);
  return h;
}
CField3D fft(const Field3D& f) {
  CField3D h = to_complex(f);
  transform(h, true);
  return h;
}
CField3D fft(const CField3D& f) {
  CField3D h = f;
  transform(h, true);
  return h;
}
CField2D ifft(const CField2D& f) {
  CField2D h = f;
  transform(h, false);
  return h;
}
CField3D ifft(const CField3D& f) {
  CField3D h = f;
  transform(h, false);
  return h;
}
Field2D ifft_real(const CField2D& f) { return real_part(ifft(f)); }
Field3D ifft_real(const CField3D& f) { return real_part(ifft(f)); }

cplx derivative_symbol(const Grid& g, int i, int j, int ax, int ay) {
  auto one = [](int order, cplx first, double second) -> cplx {
    switch (order) {
      case 0: return 1.0;
      case 1: return first;
      case 2: return second;
    }
    throw DomainError("derivative order must be 0, 1 or 2");
  };
  return one(ax, g.dx_symbol(i), g.dxx_symbol(i)) * one(ay, g.dy_symbol(j), g.dyy_symbol(j));
}

bool dealias_keep(const Grid& g, int i, int j) {
  return 3 * std::abs(g.kx_int(i)) <= g.nx() && 3 * std::abs(g.ky_int(j)) <= g.ny();
}

void apply_symbol(CField2D& hat, const Grid& g, int ax, int ay) {
  require_on_grid(hat, g, "apply_symbol");
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      cplx s = derivative_symbol(g, i, j, ax, ay);
      for (int c = 0; c < hat.ncomp(); ++c) hat(c, i, j) *= s;
    }
}

void apply_symbol(CField3D& hat, const Grid& g, int ax, int ay) {
  require_on_grid(hat, g, "apply_symbol");
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      cplx s = derivative_symbol(g, i, j, ax, ay);
      for (int c = 0; c < hat.ncomp(); ++c) {
        cplx* col = hat.column(c, i, j);
        for (int k = 0; k < g.nz(); ++k) col[k] *= s;
      }
    }
}

void truncate_two_thirds(CField2D& hat, const Grid& g) {
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j)
      if (!dealias_keep(g, i, j))
        for (int c = 0; c < hat.ncomp(); ++c) hat(c, i, j) = 0.0;
}

void truncate_two_thirds(CField3D& hat, const Grid& g) {
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j)
      if (!dealias_keep(g, i, j))
        for (int c = 0; c < hat.ncomp(); ++c)
          for (int k = 0; k < g.nz(); ++k) hat(c, i, j, k) = 0.0;
}

Field2D partial(const Field2D& f, const Grid& g, int ax, int ay) {
  require_on_grid(f, g, "partial");
  CField2D h = fft(f);
  apply_symbol(h, g, ax, ay);
  return ifft_real(h);
}
Field3D partial(const Field3D& f, const Grid& g, int ax, int ay) {
  require_on_grid(f, g, "partial");
  CField3D h = fft(f);
  apply_symbol(h, g, ax, ay);
  return ifft_real(h);
}
CField2D partial(const CField2D& f, const Grid& g, int ax, int ay) {
  require_on_grid(f, g, "partial");
  CField2D h = fft(f);
  apply_symbol(h, g, ax, ay);
  return ifft(h);
}
CField3D partial(const CField3D& f, const Grid& g, int ax, int ay) {
  require_on_grid(f, g, "partial");
  CField3D h = fft(f);
  apply_symbol(h, g, ax, ay);
  return ifft(h);
}

Field2D gradient(const Field2D& f, const Grid& g) {
  if (f.ncomp() != 1) throw ShapeError("gradient expects a scalar field");
  Field2D dx = partial(f, g, 1, 0), dy = partial(f, g, 0, 1);
  Field2D out(f.nx(), f.ny(), 2);
  std::copy(dx.comp(0), dx.comp(0) + dx.size(), out.comp(0));
  std::copy(dy.comp(0), dy.comp(0) + dy.size(), out.comp(1));
  return out;
}

Field3D gradient(const Field3D& f, const Grid& g) {
  if (f.ncomp() != 1) throw ShapeError("gradient expects a scalar field");
  Field3D dx = partial(f, g, 1, 0), dy = partial(f, g, 0, 1);
  Field3D out(f.nx(), f.ny(), f.nz(), 2);
  std::copy(dx.values().begin(), dx.values().end(), out.values().begin());
  std::copy(dy.values().begin(), dy.values().end(), out.values().begin() + dx.size());
  return out;
}

Field2D divergence(const Field2D& v, const Grid& g) {
  require_on_grid(v, g, "divergence");
  if (v.ncomp() != 2) throw ShapeError("divergence expects a 2-vector field");
  CField2D h = fft(v);
  CField2D d(v.nx(), v.ny(), 1);
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) d(0, i, j) = g.dx_symbol(i) * h(0, i, j) + g.dy_symbol(j) * h(1, i, j);
  return ifft_real(d);
}

template <class T>
static BasicField3D<T> div3(const BasicField3D<T>& v, const Grid& g) {
  require_on_grid(v, g, "divergence");
  if (v.ncomp() != 2) throw ShapeError("divergence expects a 2-vector field");
  CField3D h = fft(v);
  CField3D d(v.nx(), v.ny(), v.nz(), 1);
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j)
      for (int k = 0; k < g.nz(); ++k)
        d(0, i, j, k) = g.dx_symbol(i) * h(0, i, j, k) + g.dy_symbol(j) * h(1, i, j, k);
  if constexpr (std::is_same_v<T, double>)
    return ifft_real(d);
  else
    return ifft(d);
}

Field3D divergence(const Field3D& v, const Grid& g) { return div3(v, g); }
CField3D divergence(const CField3D& v, const Grid& g) { return div3(v, g); }

CField2D divergence(const CField2D& v, const Grid& g) {
  require_on_grid(v, g, "divergence");
  if (v.ncomp() != 2) throw ShapeError("divergence expects a 2-vector field");
  CField2D h = fft(v);
  CField2D d(v.nx(), v.ny(), 1);
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) d(0, i, j) = g.dx_symbol(i) * h(0, i, j) + g.dy_symbol(j) * h(1, i, j);
  return ifft(d);
}

HorizontalDerivatives2D horizontal_derivatives(const Field2D& f, const Grid& g) {
  require_on_grid(f, g, "horizontal_derivatives");
  HorizontalDerivatives2D out;
  out.grad = Field2D(f.nx(), f.ny(), 2 * f.ncomp());
  for (int c = 0; c < f.ncomp(); ++c) {
    Field2D gc = gradient(pick(f, c), g);
    std::copy(gc.comp(0), gc.comp(0) + gc.slice_size(), out.grad.comp(2 * c));
    std::copy(gc.comp(1), gc.comp(1) + gc.slice_size(), out.grad.comp(2 * c + 1));
  }
  if (f.ncomp() == 2) out.div = divergence(f, g);
  return out;
}

HorizontalDerivatives3D horizontal_derivatives(const Field3D& f, const Grid& g) {
  require_on_grid(f, g, "horizontal_derivatives");
  HorizontalDerivatives3D out;
  out.grad = Field3D(f.nx(), f.ny(), f.nz(), 2 * f.ncomp());
  SpectralField3D s(f, g);
  Field3D dx = s.derivative(1, 0), dy = s.derivative(0, 1);
  const std::size_t block = std::size_t(f.nx()) * f.ny() * f.nz();
  for (int c = 0; c < f.ncomp(); ++c) {
    std::copy(dx.values().begin() + c * block, dx.values().begin() + (c + 1) * block,
              out.grad.values().begin() + (2 * c) * block);
    std::copy(dy.values().begin() + c * block, dy.values().begin() + (c + 1) * block,
              out.grad.values().begin() + (2 * c + 1) * block);
  }
  if (f.ncomp() == 2) out.div = divergence(f, g);
  return out;
}

Field2D dealias(const Field2D& f, const Grid& g) {
  CField2D h = fft(f);
  truncate_two_thirds(h, g);
  return ifft_real(h);
}
Field3D dealias(const Field3D& f, const Grid& g) {
  CField3D h = fft(f);
  truncate_two_thirds(h, g);
  return ifft_real(h);
}

SpectralField3D::SpectralField3D(const Field3D& f, const Grid& g) : g_(&g), hat_(fft(f)) {
  require_on_grid(f, g, "SpectralField3D");
}

Field3D SpectralField3D::derivative(int ax, int ay) const {
  CField3D h = hat_;
  apply_symbol(h, *g_, ax, ay);
  return ifft_real(h);
}

SpectralField2D::SpectralField2D(const Field2D& f, const Grid& g) : g_(&g), hat_(fft(f)) {
  require_on_grid(f, g, "SpectralField2D");
}

Field2D SpectralField2D::derivative(int ax, int ay) const {
  CField2D h = hat_;
  apply_symbol(h, *g_, ax, ay);
  return ifft_real(h);
}

}  // namespace hlcpe
