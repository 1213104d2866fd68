// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hlcpe/grid.hpp"

namespace hlcpe {

/// 2x2 matrix fields are Field2D with 4 components, entry (r,s) at 2r+s.
inline int mat_index(int r, int s) { return 2 * r + s; }

struct FlowOptions {
  double det_floor = 0.1;
  double inv_tol = 1e-10;
  int max_iter = 50;
};

/// Lagrangian map X(t, y) = y + displacement(y) along the averaged velocity.
/// The Jacobian is stored as its deviation from the identity so that the
/// reference state is represented exactly.
struct FlowMap {
  Field2D displacement;  // X - y, 2 components
  Field2D grad_dev;      // grad X - I
  Field2D z;             // (grad X)^{-1}
  Field2D det;           // det grad X
  double t = 0.0;

  static FlowMap identity(const Grid& g);
  Field2D jacobian() const;         // grad X
  Field2D positions(const Grid& g) const;  // X wrapped into [0,1)^2
};

struct InvertibilityReport {
  double supnorm_dev = 0.0;  // max over nodes of the spectral norm of grad X - I
  double min_det = 0.0;
  bool ok = false;
};

struct InverseJacobian {
  Field2D z;
  Field2D det;
};

/// Cofactor inverse of a 2x2 matrix field.
InverseJacobian inverse_jacobian(const Field2D& grad);

/// Spectral norm of each 2x2 matrix of a field.
Field2D matrix_norm(const Field2D& m);

InvertibilityReport check_invertibility(const FlowMap& fm, const FlowOptions& opt = {});

/// One RK4 step of dX/dt = vbar(X) and d(grad X)/dt = (grad vbar)(X) grad X for
/// an Eulerian velocity vbar.
FlowMap advance_flow(const FlowMap& fm, const Field2D& vbar, double dt, const Grid& g,
                     const FlowOptions& opt = {});

/// Lagrangian update with vbar already expressed at the particles, trapezoidal
/// in time between the old and new averaged velocities.
FlowMap advance_flow_lagrangian(const FlowMap& fm, const Field2D& vbar_old, const Field2D& vbar_new, double dt,
                                const Grid& g, const FlowOptions& opt = {});

/// Y with X(Y(x)) = x at every grid node, wrapped into [0,1)^2.
Field2D invert_map(const FlowMap& fm, const Grid& g, const FlowOptions& opt = {});

/// Trigonometric interpolation of f at the given absolute positions.
Field2D compose(const Field2D& f, const Field2D& positions, const Grid& g);
Field3D compose(const Field3D& f, const Field2D& positions, const Grid& g);

/// Grid-node positions shifted by a displacement field.
Field2D shifted_nodes(const Field2D& displacement, const Grid& g);

}  // namespace hlcpe
