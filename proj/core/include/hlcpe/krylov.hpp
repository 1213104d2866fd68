// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

#include <Eigen/Dense>

namespace hlcpe {

using VectorMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct GmresOptions {
  double tol = 1e-10;  // relative to ||b||
  int restart = 40;
  int max_iter = 400;
};

struct GmresResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual = 0.0;  // final relative residual
  bool converged = false;
};

/// Restarted GMRES with right preconditioning, solving A x = b. An empty
/// preconditioner means the identity.
GmresResult gmres(const VectorMap& a, const VectorMap& precond, const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                  const GmresOptions& opt = {});

}  // namespace hlcpe
