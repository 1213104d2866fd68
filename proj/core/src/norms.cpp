// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlcpe/norms.hpp"

#include <cmath>

#include "hlcpe/spectral.hpp"

namespace hlcpe {

namespace {

CField2D to_complex(const Field2D& f) {
  CField2D c(f.nx(), f.ny(), f.ncomp());
  for (std::size_t n = 0; n < f.size(); ++n) c[n] = f[n];
  return c;
}

CField3D to_complex(const Field3D& f) {
  CField3D c(f.nx(), f.ny(), f.nz(), f.ncomp());
  for (std::size_t n = 0; n < f.size(); ++n) c[n] = f[n];
  return c;
}

// sum over modes of weight(kx, ky) |f_hat|^2 / N^2, per level
double spectral_sum2d(const CField2D& hat, const Grid& g, int order) {
  const double nh = double(g.nx()) * g.ny();
  double s = 0.0;
  for (int c = 0; c < hat.ncomp(); ++c)
    for (int i = 0; i < g.nx(); ++i)
      for (int j = 0; j < g.ny(); ++j) {
        double k2 = g.kx(i) * g.kx(i) + g.ky(j) * g.ky(j);
        double w = 1.0;
        if (order >= 1) w += k2;
        if (order >= 2) w += k2 * k2;
        s += w * std::norm(hat(c, i, j));
      }
  return s / (nh * nh);
}

double weighted_sum3d(const CField3D& f, const Grid& g) {
  const double nh = double(g.nx()) * g.ny();
  const int nz = g.nz();
  double s = 0.0;
  for (std::size_t col = 0; col < f.columns(); ++col)
    for (int k = 0; k < nz; ++k) s += g.weights()[k] * std::norm(f[col * nz + k]);
  return s / nh;
}

// Horizontal Sobolev sum of every level weighted in z.
double horizontal_sum3d(const CField3D& f, const Grid& g, int order) {
  CField3D hat = fft(f);
  const double nh = double(g.nx()) * g.ny();
  const int nz = g.nz();
  double s = 0.0;
  for (int c = 0; c < f.ncomp(); ++c)
    for (int i = 0; i < g.nx(); ++i)
      for (int j = 0; j < g.ny(); ++j) {
        double k2 = g.kx(i) * g.kx(i) + g.ky(j) * g.ky(j);
        double w = 1.0;
        if (order >= 1) w += k2;
        if (order >= 2) w += k2 * k2;
        const cplx* col = hat.column(c, i, j);
        for (int k = 0; k < nz; ++k) s += w * g.weights()[k] * std::norm(col[k]);
      }
  return s / (nh * nh * nh);
}

}  // namespace

double norm_l2(const CField2D& f) {
  double s = 0.0;
  for (const auto& v : f.values()) s += std::norm(v);
  return std::sqrt(s / double(f.slice_size()));
}
double norm_l2(const Field2D& f) { return norm_l2(to_complex(f)); }

double norm_l2(const CField3D& f, const Grid& g) { return std::sqrt(weighted_sum3d(f, g)); }
double norm_l2(const Field3D& f, const Grid& g) { return norm_l2(to_complex(f), g); }

double norm_h1(const CField2D& f, const Grid& g) {
  require_on_grid(f, g, "norm_h1");
  return std::sqrt(spectral_sum2d(fft(f), g, 1));
}
double norm_h1(const Field2D& f, const Grid& g) { return norm_h1(to_complex(f), g); }

double norm_h1(const CField3D& f, const Grid& g) {
  require_on_grid(f, g, "norm_h1");
  CField3D fz = apply_vertical(g.dz(), f);
  return std::sqrt(horizontal_sum3d(f, g, 1) + weighted_sum3d(fz, g));
}
double norm_h1(const Field3D& f, const Grid& g) { return norm_h1(to_complex(f), g); }

double norm_h2(const CField3D& f, const Grid& g) {
  require_on_grid(f, g, "norm_h2");
  CField3D fz = apply_vertical(g.dz(), f);
  CField3D fzz = apply_vertical(g.dz(), fz);
  return std::sqrt(horizontal_sum3d(f, g, 2) + horizontal_sum3d(fz, g, 1) + weighted_sum3d(fzz, g));
}
double norm_h2(const Field3D& f, const Grid& g) { return norm_h2(to_complex(f), g); }

}  // namespace hlcpe
