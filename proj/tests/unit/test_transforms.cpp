// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>

#include "hlcpe/error.hpp"
#include "hlcpe/transforms.hpp"
#include "support.hpp"

using namespace hlcpe;

TEST_CASE("vertical coordinate map endpoints and inverse") {
  CHECK(zprime_of_z(0.0) == 0.0);
  CHECK(zprime_of_z(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(z_of_zprime(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  // dz'/dz = e^{-z} / delta
  const double z = 0.37, h = 1e-6;
  CHECK((zprime_of_z(z + h) - zprime_of_z(z - h)) / (2 * h) ==
        doctest::Approx(std::exp(-z) / (1.0 - std::exp(-1.0))).epsilon(1e-8));
  CHECK_THROWS_AS(zprime_of_z(1.5), DomainError);
  test::require_module_check("transforms");
}

TEST_CASE("hydrostatic density profiles") {
  Grid g(4, 4, 5);
  Field2D xi(4, 4, 1, 2.0);
  PhysicalParams p;
  p.model = Model::Gamma1;
  const Field3D phys = density_from_surface(xi, g, p, VerticalCoordinate::Physical);
  const Field3D tr = density_from_surface(xi, g, p, VerticalCoordinate::Transformed);
  for (int k = 0; k < 5; ++k) {
    CHECK(phys(0, 1, 2, k) == doctest::Approx(2.0 * std::exp(-g.z(k))));
    // rho(z(z')) expressed in z' is linear
    CHECK(tr(0, 1, 2, k) == doctest::Approx(2.0 * (1.0 - kDelta * g.z(k))));
  }
  p.model = Model::GeneralNoGravity;
  const Field3D flat = density_from_surface(xi, g, p, VerticalCoordinate::Physical);
  for (double v : flat.values()) CHECK(v == 2.0);
  Field2D bad(4, 4, 1, 0.0);
  CHECK_THROWS_AS(density_from_surface(bad, g, p, VerticalCoordinate::Physical), DomainError);
}

TEST_CASE("pressure laws") {
  PhysicalParams p;
  p.model = Model::GeneralNoGravity;
  // P(s) = s + s^2 / 4
  CHECK(p.pressure.P(2.0) == doctest::Approx(3.0));
  CHECK(p.pressure.dP(2.0) == doctest::Approx(2.0));
  // e(xi) = xi int_1^xi P(s)/s^2 ds - P(1)(xi - 1)
  const double xi = 1.7;
  const double ref = xi * (std::log(xi) + 0.25 * (xi - 1.0)) - 1.25 * (xi - 1.0);
  CHECK(p.pressure.internal_energy(xi) == doctest::Approx(ref).epsilon(1e-14));
  CHECK(p.pressure.internal_energy(1.0) == 0.0);
}

TEST_CASE("parameter validation") {
  PhysicalParams p;
  CHECK_NOTHROW(p.validate());
  p.mu_prime = -1.5;
  CHECK_THROWS_AS(p.validate(), DomainError);
  CHECK_NOTHROW(p.validate_except_lame());
  p = {};
  p.mu = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = {};
  p.model = Model::GeneralNoGravity;
  p.pressure.c2 = 1.5;  // P'(4) = 3
  CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("entropy density") {
  CHECK(entropy_density(1.0) == 0.0);
  CHECK(entropy_density(0.5) > 0.0);
  CHECK(entropy_density(3.0) == doctest::Approx(3.0 * std::log(3.0) - 2.0));
}
