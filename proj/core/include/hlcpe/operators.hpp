// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hlcpe/grid.hpp"
#include "hlcpe/transforms.hpp"

namespace hlcpe {

/// Coefficients of the generic Lame-type operator
///   h (mu Lap_H + mu' grad_H div_H) + g mu d/dz (beta d/dz).
/// Hydrostatic (Gamma1): h = a = 1/((1 - delta z) xi0), g = 1/xi0,
/// beta = (1 - delta z)/delta^2, so g*beta = b. Gamma2: h = g = c = 1/(xi0 + z/2),
/// beta = 1. No gravity: h = g = 1/xi0, beta = 1.
struct LameCoefficients {
  Field3D h;
  Field3D g;
  std::vector<double> beta;

  static LameCoefficients hydrostatic(const Field2D& xi0, const Grid& grid);
  static LameCoefficients hydrostatic(double xi_bar, const Grid& grid);
  static LameCoefficients gamma2(const Field2D& xi0, const Grid& grid);
  static LameCoefficients isotropic(const Field2D& xi0, const Grid& grid);
  static LameCoefficients for_model(Model m, const Field2D& xi0, const Grid& grid);

  // a and b of the hydrostatic operator, b1 = (1 - delta z)^2 / delta^2
  static double a(double z, double xi0) { return 1.0 / ((1.0 - kDelta * z) * xi0); }
  static double b(double z, double xi0) { return (1.0 - kDelta * z) / (kDelta * kDelta * xi0); }
  static double b1(double z) { return (1.0 - kDelta * z) * (1.0 - kDelta * z) / (kDelta * kDelta); }
};

/// z-only coefficients of one horizontal Fourier mode.
struct VerticalProfile {
  std::vector<double> h, g, beta;

  static VerticalProfile horizontal_mean(const LameCoefficients& c);
};

enum class BoundaryTag { TopDirichletBottomNeumann };

/// Operator on flattened field storage with an optional dense realization.
class LinearOperator {
 public:
  using Apply = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  LinearOperator(Eigen::Index n, Apply apply, std::optional<Eigen::MatrixXd> dense = std::nullopt, double shift = 0.0)
      : n_(n), apply_(std::move(apply)), dense_(std::move(dense)), shift_(shift) {}

  Eigen::Index size() const { return n_; }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  bool has_dense() const { return dense_.has_value(); }
  const Eigen::MatrixXd& dense() const;
  BoundaryTag boundary() const { return BoundaryTag::TopDirichletBottomNeumann; }
  double shift() const { return shift_; }

 private:
  Eigen::Index n_;
  Apply apply_;
  std::optional<Eigen::MatrixXd> dense_;
  double shift_;
};

/// Largest grid with a dense realization.
bool dense_allowed(const Grid& g);

/// Generic Lame-type operator. Row k = Nz-1 returns V (Dirichlet row), row
/// k = 0 returns dV/dz (Neumann row).
Field3D apply_lame(const Field3D& v, const LameCoefficients& c, const Grid& g, const PhysicalParams& p);
/// The differential expression at every node, boundary rows not replaced.
Field3D lame_expression(const Field3D& v, const LameCoefficients& c, const Grid& g, const PhysicalParams& p);
CField3D apply_lame(const CField3D& v, const LameCoefficients& c, const Grid& g, const PhysicalParams& p);

Field3D apply_hydrostatic_lame(const Field3D& v, const Field2D& xi0, const Grid& g, const PhysicalParams& p);

/// A_CHS applied to (zeta, V): (-xi_bar div_H avg V, -grad_H zeta + A_HL,xi_bar V)
/// with the boundary rows of the second block carrying only the boundary conditions.
struct ChsState {
  Field2D zeta;
  Field3D v;
};
ChsState apply_chs(const ChsState& s, double xi_bar, const Grid& g, const PhysicalParams& p);

/// Overwrite the boundary nodes so that V = 0 at z = 1 and dV/dz = 0 at z = 0.
Field3D project_boundary(const Field3D& v, const Grid& g);
CField3D project_boundary(const CField3D& v, const Grid& g);

/// Nz x (Nz-2) map from interior values to full columns obeying the
/// boundary conditions.
Eigen::MatrixXd lift_matrix(const Grid& g);

/// Dense periodic spectral differentiation matrices on [0,1) from the closed
/// forms (independent of the FFT path).
Eigen::MatrixXd fourier_d1(int n);
Eigen::MatrixXd fourier_d2(int n);

/// Dense realizations with row replacement at the boundary nodes, indexed as
/// the field storage.
Eigen::MatrixXd assemble_lame_dense(const LameCoefficients& c, const Grid& g, const PhysicalParams& p);
Eigen::MatrixXd assemble_chs_dense(double xi_bar, const Grid& g, const PhysicalParams& p);

LinearOperator assemble_hydrostatic_lame(const Field2D& xi0, const Grid& g, const PhysicalParams& p,
                                         bool want_dense = false);
LinearOperator assemble_chs(double xi_bar, const Grid& g, const PhysicalParams& p, bool want_dense = false);

/// Flattening helpers for (zeta, V) states.
Eigen::VectorXd pack(const ChsState& s);
ChsState unpack_chs(const Eigen::VectorXd& x, const Grid& g);

/// Mode (i,j) of the Lame block on interior vertical unknowns, ordered
/// (component, interior level), boundary conditions eliminated.
Eigen::MatrixXcd mode_lame_block(const Grid& g, const VerticalProfile& prof, const PhysicalParams& p, int i, int j);

/// Mode (i,j) of [[0, -xi_bar div avg], [-pscale grad, L]] on (zeta, interior V).
Eigen::MatrixXcd mode_chs_block(const Grid& g, const VerticalProfile& prof, const PhysicalParams& p, double xi_bar,
                                double pscale, int i, int j);

struct SymbolEigs {
  double lambda1 = 0.0;  // (mu + mu') |k|^2
  double lambda2 = 0.0;  // mu |k|^2
  Eigen::Matrix2d symbol;
};

/// Eigenvalues of the principal symbol of -(mu Lap_H + mu' grad div) at
/// integer wavenumber k (multiplier 2 pi k).
SymbolEigs lame_symbol_eigs(int kx, int ky, double mu, double mu_prime);

struct EllipticityReport {
  double min_lambda1 = 0.0;
  double min_lambda2 = 0.0;
  int argmin_kx = 0, argmin_ky = 0;
  double min_b1 = 0.0;
  bool ok = false;
  std::string explanation;
};

EllipticityReport symbol_ellipticity_report(double mu, double mu_prime, int kmax);

/// Plain-text coordinate matrix-market export.
void write_matrix_market(const Eigen::MatrixXd& m, const std::string& path, const std::string& comment = "");

}  // namespace hlcpe
