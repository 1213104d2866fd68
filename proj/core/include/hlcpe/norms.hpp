// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hlcpe/grid.hpp"

namespace hlcpe {

// Discrete norms on the unit cell. Horizontal derivatives are taken from the
// Fourier coefficients (Parseval), vertical ones with the collocation D_z and
// Clenshaw-Curtis weights.
//   l2:  sqrt(sum_c mean_ij int_z |f|^2)
//   h1:  l2 plus all first derivatives (x, y and z in 3D)
//   h2:  h1 plus all second derivatives

double norm_l2(const Field2D& f);
double norm_l2(const CField2D& f);
double norm_l2(const Field3D& f, const Grid& g);
double norm_l2(const CField3D& f, const Grid& g);

double norm_h1(const Field2D& f, const Grid& g);
double norm_h1(const CField2D& f, const Grid& g);
double norm_h1(const Field3D& f, const Grid& g);
double norm_h1(const CField3D& f, const Grid& g);

double norm_h2(const Field3D& f, const Grid& g);
double norm_h2(const CField3D& f, const Grid& g);

}  // namespace hlcpe
