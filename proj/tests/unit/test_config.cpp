// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "hlcpe/config.hpp"
#include "hlcpe/error.hpp"
#include "hlcpe/simulation.hpp"
#include "support.hpp"

using namespace hlcpe;

namespace {

// path and line reported for a rejected document
std::pair<std::string, int> rejection(const std::string& text) {
  try {
    parse_run_config(text);
  } catch (const ConfigError& e) {
    return {e.path(), e.line()};
  }
  return {"", 0};
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig c = parse_run_config(R"({"schema_version": 1})");
  CHECK(c.mode == Mode::GlobalGamma1);
  CHECK(c.grid.nx == 16);
  CHECK(c.initial.preset == InitialData::Preset::Steady);
  CHECK(c.tol.det_floor == 0.1);
}

TEST_CASE("errors name the field and the line") {
  const std::string text =
      "{\n"
      "  \"schema_version\": 1,\n"
      "  \"grid\": {\"nx\": 16, \"ny\": 16, \"nz\": 9},\n"
      "  \"params\": {\n"
      "    \"mu\": -1.0\n"
      "  }\n"
      "}\n";
  const auto [path, line] = rejection(text);
  CHECK(path == "params.mu");
  CHECK(line == 5);
  CHECK(rejection(R"({"schema_version": 1, "grid": {"nx": 15}})").first == "grid");
  CHECK(rejection(R"({"schema_version": 1, "dt": "fast"})").first == "dt");
  CHECK(rejection(R"({"schema_version": 1, "initial": {"preset": "vortex"}})").first == "initial.preset");
  CHECK(rejection(R"({"schema_version": 1, "mode": "Gamma9"})").first == "mode");
  CHECK(rejection(R"({"schema_version": 1, "extra": 1})").first == "extra");
  CHECK(rejection(R"({"schema_version": 1, "params": {"mu": 1.0, "mu_prime": -1.5}})").first == "params.mu_prime");
  CHECK(rejection("{\"schema_version\": 1,\n\"dt\": }").second == 2);
}

TEST_CASE("config validation check") { test::require_module_check("cli.config"); }

TEST_CASE("canonical JSON parses back to the same config") {
  RunConfig c = parse_run_config(
      R"({"schema_version": 1, "mode": "LocalGamma2", "dt": 0.002, "initial": {"preset": "random_smooth", "amplitude": 0.1, "seed": 4}})");
  const RunConfig d = parse_run_config(run_config_json(c));
  CHECK(run_config_json(c) == run_config_json(d));
  CHECK(d.mode == Mode::LocalGamma2);
  CHECK(d.initial.seed == 4);
}

TEST_CASE("output directory override") {
  ::setenv(kOutputDirEnv, "/tmp/elsewhere", 1);
  CHECK(resolve_output_dir("out") == "/tmp/elsewhere");
  ::unsetenv(kOutputDirEnv);
  CHECK(resolve_output_dir("out") == "out");
}

TEST_CASE("resolvent and spectrum configs") {
  const ResolventConfig r = parse_resolvent_config(R"({"schema_version": 1, "lambda": 2.5})");
  CHECK(r.lambda == cplx(2.5, 0.0));
  const ResolventConfig ri = parse_resolvent_config(R"({"schema_version": 1, "lambda": {"re": 0, "im": 3}})");
  CHECK(ri.lambda == cplx(0.0, 3.0));
  CHECK_THROWS_AS(parse_resolvent_config(R"({"schema_version": 1, "lambda": {"re": -1}})"), ConfigError);
  const SpectrumConfig s = parse_spectrum_config(R"({"schema_version": 1, "params": {"mu_prime": -1.5}})");
  CHECK(s.params.mu_prime == -1.5);
  CHECK_THROWS_AS(
      parse_spectrum_config(R"({"schema_version": 1, "grid": {"nx": 64, "ny": 64, "nz": 17}, "method": "dense"})"),
      ConfigError);
}

TEST_CASE("simulation writes its outputs") {
  const auto dir = std::filesystem::temp_directory_path() / "hlcpe_unit_sim";
  std::filesystem::remove_all(dir);
  RunConfig c = parse_run_config(R"({"schema_version": 1, "grid": {"nx": 8, "ny": 8, "nz": 5}, "dt": 0.1, "t_end": 0.5})");
  c.output_dir = dir.string();
  c.snapshot_every = 5;
  const RunResult r = run_simulation(c);
  CHECK(r.termination == Termination::Completed);
  CHECK(r.steps == 5);
  CHECK(r.rows.size() == 6);
  CHECK(std::filesystem::exists(dir / "diagnostics.csv"));
  CHECK(std::filesystem::exists(dir / "summary.json"));
  CHECK(std::filesystem::exists(dir / "snapshots" / "step_000005_v.bin"));
  CHECK(exit_code(Termination::MapNoninvertible) == kExitMapNoninvertible);
  std::filesystem::remove_all(dir);
}

TEST_CASE("t_end that is not a multiple of dt warns") {
  RunConfig c = parse_run_config(R"({"schema_version": 1, "grid": {"nx": 4, "ny": 4, "nz": 3}, "dt": 0.3, "t_end": 1.0})");
  RunHooks h;
  h.write_files = false;
  const RunResult r = run_simulation(c, h);
  CHECK(r.steps == 3);
  REQUIRE_FALSE(r.warnings.empty());
  CHECK(r.warnings.front().find("not a multiple") != std::string::npos);
}
