// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hlcpe/evolve.hpp"

namespace hlcpe::verification {

/// A small analytic state sampled on the grid together with F1 and F2
/// recomputed from the full transformed equations by automatic
/// differentiation of the change of variables.
struct OracleCase {
  LagrangianState state;
  Field3D dtv;
  Field2D f1;
  Field3D f2;
};

struct OracleOptions {
  double displacement = 0.01;  // bound on |grad X - I|
  double perturbation = 0.05;  // amplitude of zeta - baseline
  double velocity = 0.1;
};

OracleCase chain_rule_oracle(Mode mode, const Grid& g, const PhysicalParams& p, std::uint64_t seed,
                             const OracleOptions& opt = {});

struct OracleComparison {
  Mode mode;
  std::uint64_t seed;
  double f1_rel = 0.0;  // max-norm relative error
  double f2_rel = 0.0;
};

/// Compares the hand-coded nonlinearities (dealiasing off) with the oracle.
OracleComparison compare_with_oracle(Mode mode, const Grid& g, const PhysicalParams& p, std::uint64_t seed,
                                     F2Mutation mutation = F2Mutation::None, const OracleOptions& opt = {});

}  // namespace hlcpe::verification
