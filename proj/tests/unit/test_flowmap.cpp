// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include <doctest.h>

#include "hlcpe/error.hpp"
#include "hlcpe/flowmap.hpp"
#include "support.hpp"

using namespace hlcpe;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_CASE("identity map") {
  Grid g(8, 8, 3);
  const FlowMap fm = FlowMap::identity(g);
  CHECK(max_abs(fm.displacement) == 0.0);
  CHECK(max_abs(fm.grad_dev) == 0.0);
  const InvertibilityReport r = check_invertibility(fm);
  CHECK(r.ok);
  CHECK(r.min_det == 1.0);
}

TEST_CASE("constant velocity translates") {
  Grid g(8, 8, 3);
  Field2D v(8, 8, 2);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      v(0, i, j) = 0.3;
      v(1, i, j) = -0.1;
    }
  FlowMap fm = FlowMap::identity(g);
  for (int n = 0; n < 5; ++n) fm = advance_flow(fm, v, 0.1, g);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      CHECK(fm.displacement(0, i, j) == doctest::Approx(0.15).epsilon(1e-13));
      CHECK(fm.displacement(1, i, j) == doctest::Approx(-0.05).epsilon(1e-13));
    }
  CHECK(max_abs(fm.grad_dev) < 1e-14);
}

TEST_CASE("shear flow keeps the Jacobian unimodular") {
  Grid g(16, 16, 3);
  Field2D v(16, 16, 2);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) v(0, i, j) = 0.05 * std::sin(kTwoPi * g.y(j));
  FlowMap fm = FlowMap::identity(g);
  for (int n = 0; n < 10; ++n) fm = advance_flow(fm, v, 0.05, g);
  double worst = 0.0;
  for (double d : fm.det.values()) worst = std::max(worst, std::abs(d - 1.0));
  CHECK(worst < 1e-12);
  // grad X - I = [[0, t * 2 pi 0.05 cos(2 pi y)], [0, 0]] for a shear
  CHECK(fm.grad_dev(1, 0, 3) == doctest::Approx(0.5 * kTwoPi * 0.05 * std::cos(kTwoPi * g.y(3))).epsilon(1e-10));
}

TEST_CASE("inverse Jacobian against the explicit 2x2 inverse") {
  Field2D m(1, 1, 4);
  m[0] = 1.2;
  m[1] = 0.3;
  m[2] = -0.4;
  m[3] = 0.9;
  const InverseJacobian inv = inverse_jacobian(m);
  const double det = 1.2 * 0.9 + 0.3 * 0.4;
  CHECK(inv.det[0] == doctest::Approx(det));
  CHECK(inv.z[0] == doctest::Approx(0.9 / det));
  CHECK(inv.z[1] == doctest::Approx(-0.3 / det));
  CHECK(inv.z[2] == doctest::Approx(0.4 / det));
  CHECK(inv.z[3] == doctest::Approx(1.2 / det));
  Field2D sing(1, 1, 4);
  CHECK_THROWS_AS(inverse_jacobian(sing), SingularJacobianError);
}

TEST_CASE("large deformation is reported as not invertible") {
  Grid g(8, 8, 3);
  FlowMap fm = FlowMap::identity(g);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) fm.grad_dev(0, i, j) = 0.6;
  CHECK_FALSE(check_invertibility(fm).ok);
}

TEST_CASE("flow map roundtrip, Neumann bound and Liouville rate") {
  const auto& checks = verification::acceptance_checks();
  const auto r = verification::run_check(checks.at(9), {});
  INFO(r.detail);
  CHECK(r.id == "10");
  CHECK(r.pass);
}
