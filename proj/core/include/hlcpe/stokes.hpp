// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "hlcpe/grid.hpp"
#include "hlcpe/operators.hpp"
#include "hlcpe/transforms.hpp"

namespace hlcpe {

/// (lambda - A_CHS)(zeta, V) = (f1, f2) with homogeneous boundary conditions.
/// f2 is read at interior levels only.
struct ResolventProblem {
  cplx lambda{0.0, 0.0};
  CField2D f1;
  CField3D f2;
  double xi_bar = 1.0;
  double mean_tol = 1e-10;  // on |mean f1| when lambda = 0
  double lin_tol = 1e-8;    // accepted relative residual
};

struct ResolventSolution {
  CField2D zeta;
  CField3D v;
  double residual = 0.0;  // relative, on the full nodal system
};

/// f = f_m + f_avg with mean(f_m) = 0.
struct MeanFreeDecomposition {
  Field2D f_m;
  double f_avg = 0.0;
};
MeanFreeDecomposition decompose_mean_free(const Field2D& f);

/// Per-mode direct solve. Throws CompatibilityError for lambda = 0 with a
/// non-mean-free f1, DomainError for Re lambda < 0.
ResolventSolution solve_resolvent(const ResolventProblem& p, const Grid& g, const PhysicalParams& params);

/// Smooth exact pair (zeta, V) obeying the boundary conditions together with
/// the right-hand side it induces. zeta is mean-free so that lambda = 0 is
/// admissible; only wavenumbers |k| <= 2 occur.
struct ManufacturedResolvent {
  ResolventProblem problem;
  Field2D zeta;
  Field3D v;
};
ManufacturedResolvent manufactured_resolvent(cplx lambda, const Grid& g, const PhysicalParams& params,
                                             std::uint64_t seed = 1);

/// Real-data convenience for lambda = 0.
struct SteadySolution {
  Field2D zeta;
  Field3D v;
  int iterations = 0;
  double residual = 0.0;
};
SteadySolution solve_steady(const Field2D& f1, const Field3D& f2, const Grid& g, const PhysicalParams& params);

/// Relative residual of (zeta, V) on the full nodal system: interior rows
/// lambda x - A x - f, boundary rows the boundary operators applied to V.
double resolvent_residual(const ResolventProblem& p, const CField2D& zeta, const CField3D& v, const Grid& g,
                          const PhysicalParams& params);

struct DecomposedOptions {
  int max_iter = 50;
  double tol = 1e-10;
};

/// Steady problem through the vertically averaged Stokes system for
/// (vbar, zeta) followed by the 3D elliptic problem for V, iterated on the
/// boundary traces of V.
SteadySolution solve_steady_decomposed(const Field2D& f1, const Field3D& f2, const Grid& g,
                                       const PhysicalParams& params, const DecomposedOptions& opt = {});

enum class BoundMethod { Dense, PerMode };

struct SpectralBound {
  double eta0 = 0.0;       // -max Re over the deflated spectrum
  int argmax_kx = 0, argmax_ky = 0;
  bool stable = false;     // eta0 > 0
  std::vector<cplx> eigenvalues;  // deflated spectrum (dense route only)
};

/// Spectral bound of A_CHS on the resolved subspace: the zeta mean and every
/// Fourier mode on a Nyquist line (zeta and V together) are removed. Both are
/// invariant subspaces; the Nyquist lines carry spurious slow modes because
/// first derivatives drop them while second derivatives keep them.
SpectralBound spectral_bound(const Grid& g, const PhysicalParams& params, BoundMethod method = BoundMethod::Dense);

/// Reduced dense operator on (zeta, interior V) and an orthonormal basis of
/// the resolved subspace in those coordinates.
Eigen::MatrixXd reduced_chs_dense(const Grid& g, const PhysicalParams& params);
Eigen::MatrixXd deflation_basis(const Grid& g);

struct SweepSample {
  cplx lambda;
  double ratio = 0.0;     // (|zeta|_H1 + |lambda||V| + |V|_H2) / (|f1|_H1 + |f2|)
  double v_norm = 0.0;
  double residual = 0.0;
};

struct SweepReport {
  std::vector<SweepSample> samples;
  double max_ratio = 0.0;
  double slope = 0.0;     // of log |V| vs log |lambda| over the largest |lambda|
  bool bounded = false;
};

/// Resolvent norms on lambda = 0 and lambda = i 10^j, j = 0..jmax, with a
/// seeded random unit right-hand side.
SweepReport imaginary_axis_resolvent_sweep(const Grid& g, const PhysicalParams& params, int jmax = 6,
                                           std::uint64_t seed = 7);

}  // namespace hlcpe
