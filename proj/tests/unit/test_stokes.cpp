// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>

#include "hlcpe/error.hpp"
#include "hlcpe/stokes.hpp"
#include "support.hpp"

using namespace hlcpe;

TEST_CASE("mean-free decomposition") {
  Field2D f(4, 4, 1);
  for (std::size_t n = 0; n < f.size(); ++n) f[n] = double(n);
  const MeanFreeDecomposition d = decompose_mean_free(f);
  CHECK(d.f_avg == doctest::Approx(7.5));
  double s = 0.0;
  for (double v : d.f_m.values()) s += v;
  CHECK(std::abs(s) < 1e-13);
}

TEST_CASE("resolvent rejects the left half-plane") {
  Grid g(4, 4, 5);
  PhysicalParams p;
  ManufacturedResolvent m = manufactured_resolvent(cplx(1.0, 0.0), g, p);
  m.problem.lambda = cplx(-0.5, 1.0);
  CHECK_THROWS_AS(solve_resolvent(m.problem, g, p), DomainError);
}

TEST_CASE("manufactured solutions are recovered") {
  Grid g(8, 8, 9);
  PhysicalParams p;
  p.mu = 0.5;
  p.mu_prime = 2.0;
  for (cplx lambda : {cplx(0.0, 0.0), cplx(2.0, -3.0)}) {
    const ManufacturedResolvent m = manufactured_resolvent(lambda, g, p, 4);
    const ResolventSolution s = solve_resolvent(m.problem, g, p);
    CHECK(s.residual < 1e-12);
    CField2D zeta(8, 8, 1);
    CField3D v(8, 8, 9, 2);
    for (std::size_t n = 0; n < zeta.size(); ++n) zeta[n] = m.zeta[n];
    for (std::size_t n = 0; n < v.size(); ++n) v[n] = m.v[n];
    CHECK(resolvent_residual(m.problem, zeta, v, g, p) < 1e-12);
    double err = 0.0;
    for (std::size_t n = 0; n < s.v.size(); ++n) err = std::max(err, std::abs(s.v[n] - m.v[n]));
    CHECK(err < 1e-10);
  }
}

TEST_CASE("resolvent superposition") { test::require_module_check("stokes.linearity"); }

TEST_CASE("per-mode and dense spectral bounds agree") {
  Grid g(6, 6, 7);
  PhysicalParams p;
  const SpectralBound dense = spectral_bound(g, p, BoundMethod::Dense);
  const SpectralBound modes = spectral_bound(g, p, BoundMethod::PerMode);
  CHECK(dense.stable);
  CHECK(modes.eta0 == doctest::Approx(dense.eta0).epsilon(1e-9));
}

TEST_CASE("deflation basis is orthonormal") {
  Grid g(4, 4, 5);
  const Eigen::MatrixXd q = deflation_basis(g);
  const Eigen::MatrixXd qtq = q.transpose() * q;
  CHECK((qtq - Eigen::MatrixXd::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(q.rows() == reduced_chs_dense(g, PhysicalParams{}).rows());
}

TEST_CASE("solvability, stability and the imaginary-axis sweep") {
  const auto& checks = verification::acceptance_checks();
  for (int n : {2, 3}) {
    const auto r = verification::run_check(checks.at(n), {});
    INFO(r.detail);
    CHECK(r.pass);
  }
}
