// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hlcpe/evolve.hpp"

namespace hlcpe::verification {

struct CheckOptions {
  // multiplies every "error <= tol" threshold; values >= 1 only relax
  double tolerance_scale = 1.0;
  // sign error injected into F2 wherever the hand-coded nonlinearity is used
  F2Mutation mutation = F2Mutation::None;
};

struct CheckResult {
  std::string id;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Check {
  std::string id;
  std::string name;
  std::function<CheckResult(const CheckOptions&)> run;
};

/// The numbered acceptance criteria, "1" to "11".
const std::vector<Check>& acceptance_checks();
/// Module invariants beyond the numbered criteria.
const std::vector<Check>& module_checks();

/// Runs a check, timing it and turning exceptions into failures.
CheckResult run_check(const Check& c, const CheckOptions& opt);

/// Decay rate of the linear evolution exp(t A) on the resolved subspace,
/// fitted like a simulation series.
double linear_decay_rate(const Grid& g, const PhysicalParams& p, double t_end, std::uint64_t seed);

}  // namespace hlcpe::verification
