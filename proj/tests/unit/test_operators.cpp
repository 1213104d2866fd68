// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "hlcpe/operators.hpp"
#include "support.hpp"

using namespace hlcpe;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_CASE("symbol eigenvalues have closed forms") {
  const SymbolEigs s = lame_symbol_eigs(2, -1, 1.3, 0.4);
  const double k2 = kTwoPi * kTwoPi * 5.0;
  CHECK(s.lambda1 == doctest::Approx(1.7 * k2).epsilon(1e-14));
  CHECK(s.lambda2 == doctest::Approx(1.3 * k2).epsilon(1e-14));
}

TEST_CASE("ellipticity report") {
  CHECK(symbol_ellipticity_report(1.0, 1.0, 8).ok);
  const EllipticityReport bad = symbol_ellipticity_report(1.0, -1.5, 8);
  CHECK_FALSE(bad.ok);
  CHECK(bad.min_lambda1 < 0.0);
  CHECK_FALSE(bad.explanation.empty());
}

TEST_CASE("symbol and dense operator checks") {
  const auto& checks = verification::acceptance_checks();
  for (int n : {0, 1}) {
    const auto r = verification::run_check(checks.at(n), {});
    INFO(r.detail);
    CHECK(r.pass);
  }
}

TEST_CASE("Fourier differentiation matrices") {
  const int n = 8;
  const Eigen::MatrixXd d1 = fourier_d1(n), d2 = fourier_d2(n);
  Eigen::VectorXd f(n), df(n), ddf(n);
  for (int i = 0; i < n; ++i) {
    const double x = double(i) / n;
    f(i) = std::sin(kTwoPi * x) + 0.5 * std::cos(2.0 * kTwoPi * x);
    df(i) = kTwoPi * std::cos(kTwoPi * x) - kTwoPi * std::sin(2.0 * kTwoPi * x);
    ddf(i) = -kTwoPi * kTwoPi * std::sin(kTwoPi * x) - 2.0 * kTwoPi * kTwoPi * std::cos(2.0 * kTwoPi * x);
  }
  CHECK((d1 * f - df).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((d2 * f - ddf).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("boundary projection imposes V(1) = 0 and D_z V(0) = 0") {
  Grid g(4, 4, 7);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Field3D v(4, 4, 7, 2);
  for (auto& x : v.values()) x = nd(rng);
  const Field3D p = project_boundary(v, g);
  const Field3D dz = vertical_derivative(p, g);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        CHECK(p(c, i, j, 6) == 0.0);
        CHECK(std::abs(dz(c, i, j, 0)) < 1e-12);
        for (int k = 1; k < 6; ++k) CHECK(p(c, i, j, k) == v(c, i, j, k));
      }
}

TEST_CASE("constant surface perturbation is in the kernel of A_CHS") {
  Grid g(4, 4, 5);
  PhysicalParams p;
  ChsState s{Field2D(4, 4, 1, 1.0), Field3D(4, 4, 5, 2)};
  const ChsState a = apply_chs(s, p.xi_bar, g, p);
  CHECK(max_abs(a.zeta) < 1e-14);
  CHECK(max_abs(a.v) < 1e-13);
}

TEST_CASE("hydrostatic Lame operator on a mean-free horizontal field") {
  // constant coefficients and z-independent V = (cos 2 pi x, 0): the vertical
  // part vanishes and A_HL V = (mu + mu')(2 pi)^2 V
  Grid g(8, 8, 5);
  PhysicalParams p;
  p.mu = 0.7;
  p.mu_prime = 0.2;
  Field3D v(8, 8, 5, 2);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      for (int k = 0; k < 5; ++k) v(0, i, j, k) = std::cos(kTwoPi * g.x(i));
  const LameCoefficients c = LameCoefficients::hydrostatic(Field2D(8, 8, 1, 1.0), g);
  const Field3D lv = lame_expression(v, c, g, p);
  for (int i = 0; i < 8; ++i)
    for (int k = 1; k < 4; ++k) {
      const double expected = -0.9 * kTwoPi * kTwoPi * v(0, i, 2, k) * c.h(0, i, 2, k);
      CHECK(lv(0, i, 2, k) == doctest::Approx(expected).epsilon(1e-10).scale(1.0));
    }
}
