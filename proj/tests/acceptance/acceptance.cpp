// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

// Prints one line per numbered criterion. Optional arguments select
// criteria by id.

#include <cstdio>
#include <set>
#include <string>

#include "hlcpe/verification/checks.hpp"

int main(int argc, char** argv) {
  std::set<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& c : hlcpe::verification::acceptance_checks()) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto r = hlcpe::verification::run_check(c, {});
    if (!r.pass) ++failed;
    std::printf("criterion %s: %s  %s (%.1f s): %s\n", r.id.c_str(), r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.seconds, r.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
