// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>

#include "hlcpe/error.hpp"
#include "hlcpe/evolve.hpp"
#include "hlcpe/verification/oracle.hpp"
#include "support.hpp"

using namespace hlcpe;

TEST_CASE("mode names") {
  for (Mode m : {Mode::LocalGamma1, Mode::LocalGamma2, Mode::GlobalGamma1, Mode::GeneralNoGravity})
    CHECK(mode_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(mode_from_string("Gamma3"), DomainError);
  CHECK(model_of(Mode::LocalGamma2) == Model::Gamma2);
  CHECK_FALSE(is_local(Mode::GlobalGamma1));
}

TEST_CASE("steady preset") {
  Grid g(8, 8, 5);
  PhysicalParams p;
  const LagrangianState s = initial_state(InitialData{}, Mode::LocalGamma1, g, p);
  CHECK(max_abs(s.v) == 0.0);
  for (double z : s.zeta.values()) CHECK(z == 1.0);
  const LagrangianState gs = initial_state(InitialData{}, Mode::GlobalGamma1, g, p);
  CHECK(max_abs(gs.zeta) == 0.0);
}

TEST_CASE("presets satisfy the velocity boundary conditions") {
  Grid g(8, 8, 9);
  PhysicalParams p;
  InitialData d;
  d.preset = InitialData::Preset::RandomSmooth;
  d.amplitude = 0.2;
  d.seed = 9;
  Field2D xi;
  Field3D v;
  initial_fields(d, Mode::LocalGamma1, g, p, xi, v);
  const Field3D dz = vertical_derivative(v, g);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        CHECK(std::abs(v(c, i, j, 8)) < 1e-14);
        CHECK(std::abs(dz(c, i, j, 0)) < 1e-10);
      }
}

TEST_CASE("check_state identifies terminal conditions") {
  Grid g(8, 8, 5);
  PhysicalParams p;
  StepOptions o;
  LagrangianState s = initial_state(InitialData{}, Mode::LocalGamma1, g, p);
  CHECK_NOTHROW(check_state(s, p, o));
  s.zeta(0, 2, 2) = 0.1;
  try {
    check_state(s, p, o);
    FAIL("expected a terminal error");
  } catch (const TerminalError& e) {
    CHECK(e.kind() == Termination::PositivityLost);
  }
  s = initial_state(InitialData{}, Mode::LocalGamma1, g, p);
  s.v(0, 1, 1, 2) = 1e7;
  CHECK_THROWS_AS(check_state(s, p, o), TerminalError);
}

TEST_CASE("nonlinearities vanish structurally") { test::require_module_check("evolve.structure"); }
TEST_CASE("vertical velocity boundary values") { test::require_module_check("evolve.w"); }
TEST_CASE("IMEX step is dissipative and first order") { test::require_module_check("evolve.step"); }

TEST_CASE("chain-rule oracle matches the hand-coded nonlinearities") {
  Grid g(16, 16, 9);
  PhysicalParams p;
  for (Mode m : {Mode::LocalGamma1, Mode::GlobalGamma1}) {
    const auto c = verification::compare_with_oracle(m, g, p, 1, F2Mutation::None);
    CHECK(c.f1_rel < 1e-10);
    CHECK(c.f2_rel < 1e-10);
    const auto bad = verification::compare_with_oracle(m, g, p, 1, F2Mutation::FlipAdvectionSign);
    CHECK(bad.f2_rel > 1e-6);
  }
}

TEST_CASE("stepping the steady state changes nothing") {
  Grid g(8, 8, 5);
  PhysicalParams p;
  StepOptions o;
  o.dt = 0.05;
  LagrangianState s = initial_state(InitialData{}, Mode::GlobalGamma1, g, p);
  ImexStepper st(g, p, s, o);
  for (int n = 0; n < 5; ++n) s = st.step(s);
  CHECK(max_abs(s.zeta) == 0.0);
  CHECK(max_abs(s.v) == 0.0);
  CHECK(s.steps == 5);
  CHECK(s.t == doctest::Approx(0.25));
}
