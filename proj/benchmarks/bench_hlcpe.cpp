// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include <numbers>
#include <random>

#include <benchmark/benchmark.h>

#include "hlcpe/evolve.hpp"
#include "hlcpe/flowmap.hpp"
#include "hlcpe/operators.hpp"
#include "hlcpe/stokes.hpp"

using namespace hlcpe;

namespace {

LagrangianState perturbed(Mode m, const Grid& g, const PhysicalParams& p) {
  InitialData d;
  d.preset = InitialData::Preset::RandomSmooth;
  d.amplitude = 0.1;
  d.seed = 1;
  return initial_state(d, m, g, p);
}

void BM_ApplyChs(benchmark::State& st) {
  const int n = int(st.range(0));
  Grid g(n, n, 9);
  PhysicalParams p;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  ChsState s{Field2D(n, n, 1), Field3D(n, n, 9, 2)};
  for (auto& v : s.zeta.values()) v = nd(rng);
  for (auto& v : s.v.values()) v = nd(rng);
  for (auto _ : st) benchmark::DoNotOptimize(apply_chs(s, 1.0, g, p));
}
BENCHMARK(BM_ApplyChs)->Arg(16)->Arg(32)->Arg(64);

void BM_Resolvent(benchmark::State& st) {
  const int n = int(st.range(0));
  Grid g(n, n, 9);
  PhysicalParams p;
  const ManufacturedResolvent m = manufactured_resolvent(cplx(0.0, 10.0), g, p);
  for (auto _ : st) benchmark::DoNotOptimize(solve_resolvent(m.problem, g, p));
}
BENCHMARK(BM_Resolvent)->Arg(8)->Arg(16)->Arg(32);

void BM_NonlinearityF2(benchmark::State& st) {
  const int n = int(st.range(0));
  Grid g(n, n, 9);
  PhysicalParams p;
  p.model = Model::Gamma1;
  const LagrangianState s = perturbed(Mode::LocalGamma1, g, p);
  const Field3D dtv(n, n, 9, 2);
  for (auto _ : st) benchmark::DoNotOptimize(nonlinearity_F2(s, dtv, g, p));
}
BENCHMARK(BM_NonlinearityF2)->Arg(16)->Arg(32);

void BM_ImexStep(benchmark::State& st) {
  const int n = int(st.range(0));
  Grid g(n, n, 9);
  PhysicalParams p;
  p.model = Model::Gamma1;
  const LagrangianState s0 = perturbed(Mode::LocalGamma1, g, p);
  StepOptions o;
  o.dt = 1e-3;
  ImexStepper stepper(g, p, s0, o);
  for (auto _ : st) benchmark::DoNotOptimize(stepper.step(s0));
}
BENCHMARK(BM_ImexStep)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_InvertMap(benchmark::State& st) {
  const int n = int(st.range(0));
  Grid g(n, n, 3);
  FlowMap fm = FlowMap::identity(g);
  Field2D v(n, n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v(0, i, j) = 0.1 * std::sin(2.0 * std::numbers::pi * g.y(j));
  fm = advance_flow(fm, v, 0.5, g);
  for (auto _ : st) benchmark::DoNotOptimize(invert_map(fm, g));
}
BENCHMARK(BM_InvertMap)->Arg(16)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
