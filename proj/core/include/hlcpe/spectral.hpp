// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "hlcpe/grid.hpp"

namespace hlcpe {

/// Horizontal DFT of every (component, level) slice. Forward is unscaled,
/// inverse carries the 1/(Nx*Ny) factor.
CField2D fft(const Field2D& f);
CField2D fft(const CField2D& f);
CField3D fft(const Field3D& f);
CField3D fft(const CField3D& f);
CField2D ifft(const CField2D& f);
CField3D ifft(const CField3D& f);
Field2D ifft_real(const CField2D& f);
Field3D ifft_real(const CField3D& f);

/// Symbol of d^ax/dx^ax d^ay/dy^ay at FFT index (i,j), ax, ay in {0,1,2}.
/// First derivatives drop the Nyquist mode, second derivatives keep it.
cplx derivative_symbol(const Grid& g, int i, int j, int ax, int ay);

/// True when (i,j) survives the 2/3-rule truncation.
bool dealias_keep(const Grid& g, int i, int j);

/// Multiply spectral coefficients in place.
void apply_symbol(CField2D& hat, const Grid& g, int ax, int ay);
void apply_symbol(CField3D& hat, const Grid& g, int ax, int ay);
void truncate_two_thirds(CField2D& hat, const Grid& g);
void truncate_two_thirds(CField3D& hat, const Grid& g);

/// Spectral partial derivative of every component.
Field2D partial(const Field2D& f, const Grid& g, int ax, int ay);
Field3D partial(const Field3D& f, const Grid& g, int ax, int ay);
CField2D partial(const CField2D& f, const Grid& g, int ax, int ay);
CField3D partial(const CField3D& f, const Grid& g, int ax, int ay);

/// Gradient of a scalar field (2 components).
Field2D gradient(const Field2D& f, const Grid& g);
Field3D gradient(const Field3D& f, const Grid& g);
/// Horizontal divergence of a 2-vector field.
Field2D divergence(const Field2D& v, const Grid& g);
Field3D divergence(const Field3D& v, const Grid& g);
CField2D divergence(const CField2D& v, const Grid& g);
CField3D divergence(const CField3D& v, const Grid& g);

/// Gradient of every component (component c, direction d stored at 2c+d)
/// plus the divergence when the field is a 2-vector.
struct HorizontalDerivatives2D {
  Field2D grad;
  std::optional<Field2D> div;
};
struct HorizontalDerivatives3D {
  Field3D grad;
  std::optional<Field3D> div;
};
HorizontalDerivatives2D horizontal_derivatives(const Field2D& f, const Grid& g);
HorizontalDerivatives3D horizontal_derivatives(const Field3D& f, const Grid& g);

/// 2/3-rule filtered copy.
Field2D dealias(const Field2D& f, const Grid& g);
Field3D dealias(const Field3D& f, const Grid& g);

/// Cached spectrum of a real field for repeated differentiation.
class SpectralField3D {
 public:
  SpectralField3D(const Field3D& f, const Grid& g);
  Field3D derivative(int ax, int ay) const;
  const CField3D& hat() const { return hat_; }

 private:
  const Grid* g_;
  CField3D hat_;
};

class SpectralField2D {
 public:
  SpectralField2D(const Field2D& f, const Grid& g);
  Field2D derivative(int ax, int ay) const;
  const CField2D& hat() const { return hat_; }

 private:
  const Grid* g_;
  CField2D hat_;
};

}  // namespace hlcpe
