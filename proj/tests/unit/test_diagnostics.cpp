// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <sstream>

#include <doctest.h>

#include "hlcpe/diagnostics.hpp"
#include "hlcpe/error.hpp"
#include "support.hpp"

using namespace hlcpe;

TEST_CASE("mass of the hydrostatic steady state") {
  Grid g(8, 8, 9);
  PhysicalParams p;
  p.model = Model::Gamma1;
  const LagrangianState s = initial_state(InitialData{}, Mode::LocalGamma1, g, p);
  // int_0^1 e^{-z} dz
  CHECK(lagrangian_mass(s, g, p) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  Field3D rho(8, 8, 9, 1, 3.0);
  CHECK(total_mass(rho, g) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("decay fit") {
  test::require_module_check("diagnostics.fit");
  std::vector<double> t{0, 1, 2}, y{1, 0.5, 0.25};
  CHECK_THROWS_AS(fit_decay_rate(t, y, 0.0), DomainError);
  std::vector<double> tt(20), yy(20, 1.0);
  for (int k = 0; k < 20; ++k) tt[k] = k;
  yy[15] = -1.0;
  CHECK_THROWS_AS(fit_decay_rate(tt, yy, 0.0), DomainError);
}

TEST_CASE("linear evolution decays at the spectral rate") { test::require_module_check("diagnostics.linear"); }
TEST_CASE("energy functional") { test::require_module_check("diagnostics.energy"); }

TEST_CASE("positivity report") {
  Field2D xi(4, 4, 1, 1.0);
  xi(0, 1, 1) = 0.3;
  const PositivityReport r = positivity_report(xi, 0.25, 4.0);
  CHECK(r.ok);
  CHECK(r.min == 0.3);
  CHECK_FALSE(positivity_report(xi, 0.5, 4.0).ok);
}

TEST_CASE("diagnostics csv") {
  std::vector<DiagnosticsRow> rows(2);
  rows[1].t = 0.5;
  rows[1].mass = 1.0 / 3.0;
  const std::string csv = diagnostics_csv(rows);
  std::istringstream is(csv);
  std::string header, first, second;
  std::getline(is, header);
  std::getline(is, first);
  std::getline(is, second);
  CHECK(header == "t,mass,energy,dissipation_integral,zeta_m_norm,v_norm,min_xi,max_xi,min_det,energy_residual");
  CHECK(second.rfind("0.5,0.33333333333333331,", 0) == 0);
}

TEST_CASE("recorder integrates the dissipation") {
  Grid g(8, 8, 5);
  PhysicalParams p;
  DiagnosticsRecorder rec(g, p);
  const LagrangianState s = initial_state(InitialData{}, Mode::GlobalGamma1, g, p);
  const DiagnosticsRow r = rec.observe(s);
  CHECK(r.dissipation_integral == 0.0);
  CHECK(r.energy_residual == 0.0);
  CHECK(r.min_det == 1.0);
}
