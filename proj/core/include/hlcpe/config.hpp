// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "hlcpe/evolve.hpp"
#include "hlcpe/stokes.hpp"

namespace hlcpe {

inline constexpr int kSchemaVersion = 1;

/// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutputDirEnv = "HLCPE_OUTPUT_DIR";

struct GridSize {
  int nx = 16, ny = 16, nz = 9;
};

struct Tolerances {
  double lin_tol = 1e-10;   // Krylov tolerance of the implicit block
  double inv_tol = 1e-10;   // Newton tolerance of map inversion
  double det_floor = 0.1;   // smallest admissible det grad X
  double mean_tol = 1e-10;  // compatibility check on mean f1
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  GridSize grid;
  PhysicalParams params;
  Mode mode = Mode::GlobalGamma1;
  double dt = 1e-2;
  double t_end = 1.0;
  int output_every = 1;      // steps between diagnostics rows
  int snapshot_every = 0;    // steps between field snapshots, 0 = none
  InitialData initial;
  Tolerances tol;
  bool dealias = true;
  double t_skip_fraction = 0.2;
  double blowup = 1e6;
  std::string output_dir = "hlcpe_out";
};

/// Maps dotted JSON paths ("initial.amplitude", "params.pressure.coeffs[1]")
/// to the 1-based line where the key or array element starts.
class JsonLocator {
 public:
  JsonLocator() = default;
  explicit JsonLocator(const std::string& text);
  int line(const std::string& path) const;  // 0 when unknown

 private:
  std::map<std::string, int> lines_;
};

/// Parse and validate. Unknown keys, wrong types and out-of-range values raise
/// ConfigError carrying the dotted path and line.
RunConfig parse_run_config(const std::string& text);
/// Reads the file, parses it and applies the output directory override.
RunConfig load_run_config(const std::string& path);
/// Semantic checks on a populated config, including the boundary
/// compatibility and density window of the preset initial data.
void validate_run_config(const RunConfig& c, const JsonLocator& where = {});

/// The environment override if set, else `configured`.
std::string resolve_output_dir(const std::string& configured);

/// Canonical JSON of a config (all fields, defaults filled in).
std::string run_config_json(const RunConfig& c);

struct ResolventConfig {
  GridSize grid{8, 8, 9};
  PhysicalParams params;
  cplx lambda{0.0, 0.0};
  enum class Rhs { Manufactured, Zero } rhs = Rhs::Manufactured;
  std::uint64_t seed = 1;
  double f1_mean = 0.0;  // constant added to f1
  double lin_tol = 1e-8;
  double mean_tol = 1e-10;
  std::string output_dir = "hlcpe_out";
};

ResolventConfig parse_resolvent_config(const std::string& text);
ResolventConfig load_resolvent_config(const std::string& path);

struct SpectrumConfig {
  GridSize grid{8, 8, 9};
  PhysicalParams params;
  BoundMethod method = BoundMethod::Dense;
  int kmax = 8;
  std::string output_dir;  // empty: stdout only
};

/// Lame admissibility is not enforced here; the spectrum report flags it.
SpectrumConfig parse_spectrum_config(const std::string& text);
SpectrumConfig load_spectrum_config(const std::string& path);

std::string read_text_file(const std::string& path);

}  // namespace hlcpe
