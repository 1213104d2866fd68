// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hlcpe/config.hpp"
#include "hlcpe/diagnostics.hpp"

namespace hlcpe {

/// Process exit codes. Every terminal condition has its own code.
enum ExitCode : int {
  kExitCompleted = 0,
  kExitError = 1,
  kExitConfig = 2,
  kExitPositivityLost = 3,
  kExitMapNoninvertible = 4,
  kExitBlowup = 5,
};

int exit_code(Termination t);

struct RunResult {
  Termination termination = Termination::Completed;
  std::string message;
  int steps = 0;
  double t = 0.0;
  std::vector<DiagnosticsRow> rows;
  std::optional<DecayFit> fit;
  double t_skip = 0.0;
  std::vector<std::string> warnings;
  int max_krylov_iterations = 0;
  std::string csv_path;      // empty when nothing was written
  std::string summary_path;
};

struct RunHooks {
  bool write_files = true;
  // called after every recorded diagnostics row
  std::function<void(const DiagnosticsRow&)> on_row;
};

/// Integrates from the configured preset until t_end or a terminal
/// condition. Writes diagnostics.csv, summary.json and optional snapshots to
/// cfg.output_dir. Throws ConfigError for an invalid config.
RunResult run_simulation(const RunConfig& cfg, const RunHooks& hooks = {});

/// The summary document written next to the diagnostics.
std::string summary_json(const RunConfig& cfg, const RunResult& r);

}  // namespace hlcpe
