// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlcpe/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "hlcpe/field_io.hpp"

namespace hlcpe {

int exit_code(Termination t) {
  switch (t) {
    case Termination::Completed: return kExitCompleted;
    case Termination::PositivityLost: return kExitPositivityLost;
    case Termination::MapNoninvertible: return kExitMapNoninvertible;
    case Termination::Blowup: return kExitBlowup;
  }
  return kExitError;
}

namespace {

double max_abs_field(const Field3D& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

void write_snapshot(const LagrangianState& s, const std::filesystem::path& dir) {
  char name[64];
  std::snprintf(name, sizeof name, "step_%06d", s.steps);
  write_binary(s.zeta, (dir / (std::string(name) + "_zeta.bin")).string());
  write_binary(s.v, (dir / (std::string(name) + "_v.bin")).string());
  write_binary(s.fm.displacement, (dir / (std::string(name) + "_displacement.bin")).string());
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RunResult run_simulation(const RunConfig& cfg, const RunHooks& hooks) {
  validate_run_config(cfg);
  Grid g(cfg.grid.nx, cfg.grid.ny, cfg.grid.nz);
  PhysicalParams p = cfg.params;
  p.model = model_of(cfg.mode);

  StepOptions so;
  so.dt = cfg.dt;
  so.flow.det_floor = cfg.tol.det_floor;
  so.flow.inv_tol = cfg.tol.inv_tol;
  so.gmres.tol = cfg.tol.lin_tol;
  so.nonlinear.dealias = cfg.dealias;
  so.blowup = cfg.blowup;
  so.m1_star = 0.5 * p.m1;
  so.m2_star = 2.0 * p.m2;

  RunResult r;
  const double ratio = cfg.t_end / cfg.dt;
  const long long nsteps = std::llround(ratio);
  if (std::abs(ratio - double(nsteps)) > 1e-9 * std::max(1.0, ratio))
    r.warnings.push_back("t_end is not a multiple of dt; the run stops at t = " + fmt(double(nsteps) * cfg.dt));
  r.t_skip = cfg.t_skip_fraction * double(nsteps) * cfg.dt;

  std::filesystem::path out(cfg.output_dir);
  if (hooks.write_files) {
    std::filesystem::create_directories(out);
    if (cfg.snapshot_every > 0) std::filesystem::create_directories(out / "snapshots");
  }

  LagrangianState s = initial_state(cfg.initial, cfg.mode, g, p);
  check_state(s, p, so);
  ImexStepper stepper(g, p, s, so);
  DiagnosticsRecorder rec(g, p);

  auto record = [&](const LagrangianState& st) {
    r.rows.push_back(rec.observe(st));
    if (hooks.on_row) hooks.on_row(r.rows.back());
  };
  record(s);
  if (hooks.write_files && cfg.snapshot_every > 0) write_snapshot(s, out / "snapshots");

  const double h = std::min(1.0 / g.nx(), 1.0 / g.ny());
  bool cfl_warned = false;
  bool last_recorded = true;
  try {
    for (long long n = 1; n <= nsteps; ++n) {
      LagrangianState next = stepper.step(s);
      s = std::move(next);
      r.max_krylov_iterations = std::max(r.max_krylov_iterations, stepper.last_krylov_iterations());
      const double courant = cfg.dt * max_abs_field(s.v);
      if (!cfl_warned && courant > h) {
        cfl_warned = true;
        r.warnings.push_back("CFL advisory: dt*max|V| = " + fmt(courant) + " exceeds the grid spacing " + fmt(h) +
                             " at t = " + fmt(s.t));
      }
      last_recorded = n % cfg.output_every == 0 || n == nsteps;
      if (last_recorded) record(s);
      else rec.observe(s);  // keeps the dissipation integral on every step
      if (hooks.write_files && cfg.snapshot_every > 0 && n % cfg.snapshot_every == 0)
        write_snapshot(s, out / "snapshots");
    }
    r.termination = Termination::Completed;
    r.message = "reached t_end";
  } catch (const TerminalError& e) {
    r.termination = e.kind();
    r.message = e.what();
    if (!last_recorded) record(s);
  }
  r.steps = s.steps;
  r.t = s.t;

  if (r.termination == Termination::Completed) {
    std::vector<double> ts, ys;
    for (const auto& row : r.rows) {
      ts.push_back(row.t);
      ys.push_back(row.zeta_m_norm + row.v_norm);
    }
    if (std::all_of(ys.begin(), ys.end(), [](double y) { return y == 0.0; })) {
      r.warnings.push_back("decay fit skipped: the state stays at the steady state");
    } else {
      try {
        r.fit = fit_decay_rate(ts, ys, r.t_skip);
      } catch (const DomainError& e) {
        r.warnings.push_back(std::string("decay fit skipped: ") + e.what());
      }
    }
  }

  if (hooks.write_files) {
    r.csv_path = (out / "diagnostics.csv").string();
    r.summary_path = (out / "summary.json").string();
    write_diagnostics_csv(r.rows, r.csv_path);
    std::ofstream os(r.summary_path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + r.summary_path + "' for writing");
    os << summary_json(cfg, r) << "\n";
  }
  return r;
}

std::string summary_json(const RunConfig& cfg, const RunResult& r) {
  using nlohmann::json;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["termination"] = to_string(r.termination);
  j["exit_code"] = exit_code(r.termination);
  j["message"] = r.message;
  j["steps"] = r.steps;
  j["t_final"] = r.t;
  j["max_krylov_iterations"] = r.max_krylov_iterations;
  if (r.fit)
    j["decay_fit"] = {{"eta", r.fit->eta}, {"r2", r.fit->r2}, {"samples", r.fit->samples}, {"t_skip", r.t_skip}};
  else
    j["decay_fit"] = nullptr;
  j["warnings"] = r.warnings;
  if (!r.rows.empty()) {
    const DiagnosticsRow& a = r.rows.front();
    const DiagnosticsRow& b = r.rows.back();
    j["mass_drift_relative"] = a.mass != 0.0 ? (b.mass - a.mass) / a.mass : 0.0;
    j["final"] = {{"t", b.t},           {"mass", b.mass},         {"energy", b.energy},
                  {"dissipation_integral", b.dissipation_integral}, {"zeta_m_norm", b.zeta_m_norm},
                  {"v_norm", b.v_norm}, {"min_xi", b.min_xi},     {"max_xi", b.max_xi},
                  {"min_det", b.min_det}, {"energy_residual", b.energy_residual}};
  }
  j["columns"] = diagnostics_columns();
  j["config"] = json::parse(run_config_json(cfg));
  return j.dump(2);
}

}  // namespace hlcpe
