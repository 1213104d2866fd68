// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <doctest.h>

#include "hlcpe/verification/checks.hpp"

namespace hlcpe::test {

// Runs a named module invariant from the verification library.
inline void require_module_check(const std::string& id) {
  for (const auto& c : verification::module_checks())
    if (c.id == id) {
      const auto r = verification::run_check(c, {});
      INFO(r.detail);
      CHECK(r.pass);
      return;
    }
  FAIL("no module check " << id);
}

}  // namespace hlcpe::test
