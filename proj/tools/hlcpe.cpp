// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hlcpe/config.hpp"
#include "hlcpe/error.hpp"
#include "hlcpe/field_io.hpp"
#include "hlcpe/norms.hpp"
#include "hlcpe/operators.hpp"
#include "hlcpe/simulation.hpp"
#include "hlcpe/stokes.hpp"
#include "hlcpe/verification/checks.hpp"

using nlohmann::json;
using namespace hlcpe;

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw IoError("cannot open '" + p.string() + "' for writing");
  os << text << "\n";
}

// re/im pairs per component
Field2D split(const CField2D& f) {
  Field2D r(f.nx(), f.ny(), 2 * f.ncomp());
  for (int c = 0; c < f.ncomp(); ++c)
    for (int i = 0; i < f.nx(); ++i)
      for (int j = 0; j < f.ny(); ++j) {
        r(2 * c, i, j) = f(c, i, j).real();
        r(2 * c + 1, i, j) = f(c, i, j).imag();
      }
  return r;
}

Field3D split(const CField3D& f) {
  Field3D r(f.nx(), f.ny(), f.nz(), 2 * f.ncomp());
  for (int c = 0; c < f.ncomp(); ++c)
    for (int i = 0; i < f.nx(); ++i)
      for (int j = 0; j < f.ny(); ++j)
        for (int k = 0; k < f.nz(); ++k) {
          r(2 * c, i, j, k) = f(c, i, j, k).real();
          r(2 * c + 1, i, j, k) = f(c, i, j, k).imag();
        }
  return r;
}

int cmd_simulate(const std::string& path, const std::optional<std::string>& out_dir, bool quiet) {
  RunConfig cfg = load_run_config(path);
  if (out_dir) cfg.output_dir = *out_dir;
  RunHooks hooks;
  if (!quiet)
    hooks.on_row = [](const DiagnosticsRow& r) {
      std::printf("t=%-10.4f mass=%.12f energy=%.6e |zeta_m|=%.4e |V|=%.4e xi=[%.4f, %.4f]\n", r.t, r.mass,
                  r.energy, r.zeta_m_norm, r.v_norm, r.min_xi, r.max_xi);
    };
  const RunResult r = run_simulation(cfg, hooks);
  for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("%s after %d steps at t = %.6g: %s\n", to_string(r.termination), r.steps, r.t, r.message.c_str());
  if (r.fit) std::printf("decay rate %.6f (R^2 = %.6f, %d samples)\n", r.fit->eta, r.fit->r2, r.fit->samples);
  std::printf("wrote %s and %s\n", r.csv_path.c_str(), r.summary_path.c_str());
  return exit_code(r.termination);
}

struct SpectrumArgs {
  std::optional<std::string> config;
  std::optional<double> mu, mu_prime;
  std::vector<int> grid;
  std::optional<std::string> method;
  std::optional<int> kmax;
};

int cmd_spectrum(const SpectrumArgs& a) {
  SpectrumConfig c = a.config ? load_spectrum_config(*a.config) : parse_spectrum_config(R"({"schema_version": 1})");
  if (a.mu) c.params.mu = *a.mu;
  if (a.mu_prime) c.params.mu_prime = *a.mu_prime;
  if (a.kmax) c.kmax = *a.kmax;
  if (!a.grid.empty()) c.grid = {a.grid[0], a.grid[1], a.grid[2]};
  if (a.method) {
    if (*a.method == "dense") c.method = BoundMethod::Dense;
    else if (*a.method == "per_mode") c.method = BoundMethod::PerMode;
    else throw ConfigError("method", 0, "expected \"dense\" or \"per_mode\"");
  }
  c.params.validate_except_lame();
  const Grid g(c.grid.nx, c.grid.ny, c.grid.nz);
  if (c.method == BoundMethod::Dense && !dense_allowed(g))
    throw ConfigError("method", 0, "dense spectrum is limited to small grids; use per_mode");

  const EllipticityReport e = symbol_ellipticity_report(c.params.mu, c.params.mu_prime, c.kmax);
  json j;
  j["grid"] = {c.grid.nx, c.grid.ny, c.grid.nz};
  j["mu"] = c.params.mu;
  j["mu_prime"] = c.params.mu_prime;
  j["ok"] = e.ok;
  j["explanation"] = e.explanation;
  j["min_symbol_eigenvalue"] = std::min(e.min_lambda1, e.min_lambda2);
  j["argmin_k"] = {e.argmin_kx, e.argmin_ky};
  j["min_b1"] = e.min_b1;
  j["method"] = c.method == BoundMethod::Dense ? "dense" : "per_mode";
  j["eta0"] = nullptr;
  if (e.ok) {
    const SpectralBound b = spectral_bound(g, c.params, c.method);
    j["eta0"] = finite_or_null(b.eta0);
    j["stable"] = b.stable;
    if (c.method == BoundMethod::PerMode) j["argmax_k"] = {b.argmax_kx, b.argmax_ky};
  }
  const std::string text = j.dump(2);
  std::cout << text << "\n";
  if (!c.output_dir.empty()) {
    const std::string dir = resolve_output_dir(c.output_dir);
    std::filesystem::create_directories(dir);
    write_text(std::filesystem::path(dir) / "spectrum.json", text);
  }
  return e.ok ? kExitCompleted : kExitError;
}

int cmd_resolvent(const std::string& path) {
  const ResolventConfig c = load_resolvent_config(path);
  const Grid g(c.grid.nx, c.grid.ny, c.grid.nz);
  ResolventProblem prob;
  std::optional<ManufacturedResolvent> m;
  if (c.rhs == ResolventConfig::Rhs::Manufactured) {
    m = manufactured_resolvent(c.lambda, g, c.params, c.seed);
    prob = m->problem;
  } else {
    prob.lambda = c.lambda;
    prob.f1 = CField2D(g.nx(), g.ny(), 1);
    prob.f2 = CField3D(g.nx(), g.ny(), g.nz(), 2);
    prob.xi_bar = c.params.xi_bar;
  }
  for (auto& v : prob.f1.values()) v += c.f1_mean;
  prob.lin_tol = c.lin_tol;
  prob.mean_tol = c.mean_tol;

  const ResolventSolution s = solve_resolvent(prob, g, c.params);
  const std::filesystem::path dir(resolve_output_dir(c.output_dir));
  std::filesystem::create_directories(dir);
  write_csv(split(s.zeta), g, (dir / "zeta.csv").string(), {"zeta_re", "zeta_im"});
  write_csv(split(s.v), g, (dir / "v.csv").string(), {"v1_re", "v1_im", "v2_re", "v2_im"});

  json j;
  j["lambda"] = {{"re", c.lambda.real()}, {"im", c.lambda.imag()}};
  j["grid"] = {c.grid.nx, c.grid.ny, c.grid.nz};
  j["rhs"] = m ? "manufactured" : "zero";
  j["residual"] = s.residual;
  j["norm_zeta"] = norm_h1(s.zeta, g);
  j["norm_v"] = norm_h2(s.v, g);
  if (m && c.f1_mean == 0.0) {
    double ez = 0.0, ev = 0.0;
    for (std::size_t n = 0; n < s.zeta.size(); ++n) ez = std::max(ez, std::abs(s.zeta[n] - m->zeta[n]));
    for (std::size_t n = 0; n < s.v.size(); ++n) ev = std::max(ev, std::abs(s.v[n] - m->v[n]));
    j["max_error_zeta"] = ez;
    j["max_error_v"] = ev;
  }
  const std::string text = j.dump(2);
  write_text(dir / "report.json", text);
  std::cout << text << "\n";
  return kExitCompleted;
}

int cmd_verify(bool flip, double scale, const std::vector<std::string>& only, bool modules) {
  verification::CheckOptions opt;
  opt.tolerance_scale = scale;
  if (flip) opt.mutation = F2Mutation::FlipVerticalAdvectionSign;
  std::vector<verification::Check> todo = verification::acceptance_checks();
  if (modules) {
    const auto& extra = verification::module_checks();
    todo.insert(todo.end(), extra.begin(), extra.end());
  }
  if (!only.empty()) {
    std::vector<verification::Check> picked;
    for (const auto& id : only) {
      auto it = std::find_if(todo.begin(), todo.end(), [&](const auto& c) { return c.id == id; });
      if (it == todo.end()) throw ConfigError("only", 0, "unknown check '" + id + "'");
      picked.push_back(*it);
    }
    todo = picked;
  }
  int failed = 0;
  std::printf("%-20s %-36s %-6s %8s  %s\n", "id", "check", "result", "seconds", "detail");
  for (const auto& c : todo) {
    const auto r = verification::run_check(c, opt);
    if (!r.pass) ++failed;
    std::printf("%-20s %-36s %-6s %8.2f  %s\n", r.id.c_str(), r.name.c_str(), r.pass ? "PASS" : "FAIL", r.seconds,
                r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu checks, %d failed\n", todo.size(), failed);
  return failed == 0 ? kExitCompleted : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hydrostatic Lagrangian compressible primitive equations"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Integrate a run config");
  std::string sim_config;
  std::optional<std::string> sim_out;
  bool sim_quiet = false;
  sim->add_option("config", sim_config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  sim->add_option("--output-dir", sim_out, "Override output_dir");
  sim->add_flag("-q,--quiet", sim_quiet, "Do not print diagnostics rows");

  auto* spectrum = app.add_subcommand("spectrum", "Symbol ellipticity and spectral bound of the linear operator");
  SpectrumArgs sa;
  spectrum->add_option("config", sa.config, "Spectrum config (JSON)")->check(CLI::ExistingFile);
  spectrum->add_option("--mu", sa.mu, "Shear viscosity");
  spectrum->add_option("--mu-prime", sa.mu_prime, "Second viscosity");
  spectrum->add_option("--grid", sa.grid, "nx ny nz")->expected(3)->delimiter(',');
  spectrum->add_option("--method", sa.method, "dense or per_mode");
  spectrum->add_option("--kmax", sa.kmax, "Symbol check radius");

  auto* res = app.add_subcommand("resolvent", "Solve the resolvent problem of a config");
  std::string res_config;
  res->add_option("config", res_config, "Resolvent config (JSON)")->required()->check(CLI::ExistingFile);

  auto* ver = app.add_subcommand("verify", "Run the acceptance checks");
  bool flip = false, modules = false;
  double scale = 1.0;
  std::vector<std::string> only;
  ver->add_flag("--inject-f2-sign-flip", flip, "Flip the sign of vertical advection in F2");
  ver->add_option("--tolerance-scale", scale, "Relax every tolerance by this factor")
      ->check(CLI::PositiveNumber);
  ver->add_option("--only", only, "Run only these check ids");
  ver->add_flag("--modules", modules, "Also run the module invariants");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitCompleted : kExitConfig;  // usage errors count as config errors
  }

  try {
    if (*sim) return cmd_simulate(sim_config, sim_out, sim_quiet);
    if (*spectrum) return cmd_spectrum(sa);
    if (*res) return cmd_resolvent(res_config);
    if (*ver) return cmd_verify(flip, scale, only, modules);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
