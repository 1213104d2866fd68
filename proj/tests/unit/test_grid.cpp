// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include <doctest.h>

#include "hlcpe/error.hpp"
#include "hlcpe/grid.hpp"
#include "hlcpe/spectral.hpp"
#include "support.hpp"

using namespace hlcpe;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_CASE("grid rejects unusable resolutions") {
  CHECK_THROWS_AS(Grid(5, 8, 9), ResolutionError);
  CHECK_THROWS_AS(Grid(8, 2, 9), ResolutionError);
  CHECK_THROWS_AS(Grid(8, 8, 2), ResolutionError);
  CHECK_NOTHROW(Grid(4, 4, 3));
}

TEST_CASE("vertical nodes span [0, 1] in increasing order") {
  Grid g(4, 4, 9);
  CHECK(g.z(0) == 0.0);
  CHECK(g.z(8) == 1.0);
  for (int k = 1; k < 9; ++k) CHECK(g.z(k) > g.z(k - 1));
}

TEST_CASE("field layout") {
  Field3D f(4, 6, 5, 2);
  CHECK(f.index(1, 2, 3, 4) == std::size_t(((1 * 4 + 2) * 6 + 3) * 5 + 4));
  f(1, 2, 3, 4) = 7.0;
  CHECK(f[f.index(1, 2, 3, 4)] == 7.0);
  Field2D h(4, 6, 2);
  h(1, 3, 5) = 2.0;
  CHECK(h[(1 * 4 + 3) * 6 + 5] == 2.0);
}

TEST_CASE("Clenshaw-Curtis quadrature and Chebyshev operators") { test::require_module_check("grid"); }

TEST_CASE("vertical integral of a polynomial column") {
  Grid g(4, 4, 9);
  Field3D f(4, 4, 9, 1);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 9; ++k) f(0, i, j, k) = 3.0 * g.z(k) * g.z(k) + i;
  const Field2D avg = vertical_average(f, g);
  const Field3D integ = vertical_integral(f, g);
  for (int i = 0; i < 4; ++i) {
    CHECK(avg(0, i, 1) == doctest::Approx(1.0 + i).epsilon(1e-13));
    CHECK(integ(0, i, 2, 8) == doctest::Approx(1.0 + i).epsilon(1e-13));
    const double z = g.z(4);
    CHECK(integ(0, i, 2, 4) == doctest::Approx(z * z * z + i * z).epsilon(1e-13));
  }
}

TEST_CASE("spectral derivatives of trigonometric data") {
  Grid g(16, 8, 3);
  Field2D f(16, 8, 1);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 8; ++j) f(0, i, j) = std::sin(kTwoPi * g.x(i)) * std::cos(2.0 * kTwoPi * g.y(j));
  const Field2D fx = partial(f, g, 1, 0);
  const Field2D fyy = partial(f, g, 0, 2);
  double ex = 0.0, eyy = 0.0;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 8; ++j) {
      ex = std::max(ex, std::abs(fx(0, i, j) - kTwoPi * std::cos(kTwoPi * g.x(i)) * std::cos(2.0 * kTwoPi * g.y(j))));
      eyy = std::max(eyy, std::abs(fyy(0, i, j) + 4.0 * kTwoPi * kTwoPi * f(0, i, j)));
    }
  CHECK(ex < 1e-12);
  CHECK(eyy < 1e-10);
}

TEST_CASE("fft roundtrip and first derivative drops the Nyquist mode") {
  Grid g(8, 8, 3);
  Field2D f(8, 8, 1);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) f(0, i, j) = (i % 2 ? -1.0 : 1.0) + 0.3 * std::cos(kTwoPi * g.y(j));
  const Field2D back = ifft_real(fft(f));
  for (std::size_t n = 0; n < f.size(); ++n) CHECK(back[n] == doctest::Approx(f[n]).epsilon(1e-14));
  const Field2D fx = partial(f, g, 1, 0);
  CHECK(max_abs(fx) < 1e-13);
}

TEST_CASE("two-thirds truncation keeps low modes") {
  Grid g(12, 12, 3);
  Field2D low(12, 12, 1), high(12, 12, 1);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) {
      low(0, i, j) = std::cos(kTwoPi * 2 * g.x(i));
      high(0, i, j) = std::cos(kTwoPi * 5 * g.x(i));
    }
  const Field2D dl = dealias(low, g), dh = dealias(high, g);
  for (std::size_t n = 0; n < low.size(); ++n) CHECK(dl[n] == doctest::Approx(low[n]).epsilon(1e-13));
  CHECK(max_abs(dh) < 1e-13);
}
