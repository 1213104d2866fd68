// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlcpe/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

namespace hlcpe {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Locator: a small scanner over the raw text that records where each key and
// array element starts. It assumes the text is valid JSON (it is only used
// after nlohmann has accepted it).

JsonLocator::JsonLocator(const std::string& text) {
  struct Frame {
    bool object;
    std::string base;
    std::string key;
    int index = 0;
    bool expect_key = true;
  };
  std::vector<Frame> stack;
  int line = 1;
  auto child_path = [&](const Frame& f) {
    if (f.object) return f.base.empty() ? f.key : f.base + "." + f.key;
    return f.base + "[" + std::to_string(f.index) + "]";
  };
  auto mark_value = [&]() {
    if (stack.empty()) return;
    Frame& f = stack.back();
    if (!f.object) lines_.emplace(child_path(f), line);
  };
  const std::size_t n = text.size();
  for (std::size_t p = 0; p < n; ++p) {
    const char c = text[p];
    if (c == '\n') {
      ++line;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == ':') continue;
    if (c == '{' || c == '[') {
      mark_value();
      std::string base = stack.empty() ? std::string() : child_path(stack.back());
      stack.push_back(Frame{c == '{', base, "", 0, true});
      continue;
    }
    if (c == '}' || c == ']') {
      if (!stack.empty()) stack.pop_back();
      continue;
    }
    if (c == ',') {
      if (!stack.empty()) {
        Frame& f = stack.back();
        if (f.object)
          f.expect_key = true;
        else
          ++f.index;
      }
      continue;
    }
    if (c == '"') {
      std::string s;
      const int start_line = line;
      for (++p; p < n && text[p] != '"'; ++p) {
        if (text[p] == '\\' && p + 1 < n) {
          s += text[++p];
          continue;
        }
        s += text[p];
      }
      if (!stack.empty() && stack.back().object && stack.back().expect_key) {
        Frame& f = stack.back();
        f.key = s;
        f.expect_key = false;
        lines_.emplace(child_path(f), start_line);
      } else {
        const int keep = line;
        line = start_line;
        mark_value();
        line = keep;
      }
      continue;
    }
    // number or literal
    mark_value();
    while (p + 1 < n && std::string(",]} \t\r\n").find(text[p + 1]) == std::string::npos) ++p;
  }
}

int JsonLocator::line(const std::string& path) const {
  auto it = lines_.find(path);
  return it == lines_.end() ? 0 : it->second;
}

namespace {

// Typed access to one JSON object with unknown-key detection.
class Section {
 public:
  Section(const json& j, std::string path, const JsonLocator& loc) : j_(j), path_(std::move(path)), loc_(loc) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw ConfigError(path, loc_.line(path), what);
  }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  double number(const std::string& key, double dflt) {
    if (!has(key)) return dflt;
    const json& v = j_.at(key);
    if (!v.is_number()) fail(at(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(at(key), "expected a finite number");
    return d;
  }
  int integer(const std::string& key, int dflt) {
    if (!has(key)) return dflt;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) fail(at(key), "expected an integer");
    return v.get<int>();
  }
  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t dflt) {
    if (!has(key)) return dflt;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned()) fail(at(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }
  bool boolean(const std::string& key, bool dflt) {
    if (!has(key)) return dflt;
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail(at(key), "expected true or false");
    return v.get<bool>();
  }
  std::string string(const std::string& key, const std::string& dflt) {
    if (!has(key)) return dflt;
    const json& v = j_.at(key);
    if (!v.is_string()) fail(at(key), "expected a string");
    return v.get<std::string>();
  }
  const json* child(const std::string& key) {
    if (!has(key)) return nullptr;
    return &j_.at(key);
  }

  const JsonLocator& locator() const { return loc_; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(at(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  const JsonLocator& loc_;
  std::set<std::string> seen_;
};

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1;
    for (std::size_t p = 0; p < text.size() && p + 1 < e.byte; ++p)
      if (text[p] == '\n') ++line;
    throw ConfigError("", line, std::string("malformed JSON: ") + e.what());
  }
}

void read_schema(Section& root) {
  if (!root.has("schema_version"))
    root.fail("schema_version", "missing (expected " + std::to_string(kSchemaVersion) + ")");
  const int v = root.integer("schema_version", 0);
  if (v != kSchemaVersion)
    root.fail("schema_version",
              "unsupported version " + std::to_string(v) + " (expected " + std::to_string(kSchemaVersion) + ")");
}

GridSize read_grid(Section& root, GridSize gs) {
  const json* j = root.child("grid");
  if (!j) return gs;
  Section s(*j, "grid", root.locator());
  gs.nx = s.integer("nx", gs.nx);
  gs.ny = s.integer("ny", gs.ny);
  gs.nz = s.integer("nz", gs.nz);
  s.finish();
  try {
    Grid probe(gs.nx, gs.ny, gs.nz);
  } catch (const ResolutionError& e) {
    root.fail("grid", e.what());
  }
  return gs;
}

PhysicalParams read_params(Section& root, Model model) {
  PhysicalParams p;
  p.model = model;
  const json* j = root.child("params");
  if (!j) return p;
  Section s(*j, "params", root.locator());
  p.mu = s.number("mu", p.mu);
  p.mu_prime = s.number("mu_prime", p.mu_prime);
  p.xi_bar = s.number("xi_bar", p.xi_bar);
  p.m1 = s.number("m1", p.m1);
  p.m2 = s.number("m2", p.m2);
  if (const json* pj = s.child("pressure")) {
    Section ps(*pj, "params.pressure", root.locator());
    if (const json* cj = ps.child("coeffs")) {
      if (!cj->is_array() || cj->empty()) ps.fail("params.pressure.coeffs", "expected a non-empty array of numbers");
      p.pressure.coeffs.clear();
      for (std::size_t k = 0; k < cj->size(); ++k) {
        if (!(*cj)[k].is_number())
          ps.fail("params.pressure.coeffs[" + std::to_string(k) + "]", "expected a number");
        p.pressure.coeffs.push_back((*cj)[k].get<double>());
      }
    }
    p.pressure.c1 = ps.number("c1", p.pressure.c1);
    p.pressure.c2 = ps.number("c2", p.pressure.c2);
    ps.finish();
  }
  s.finish();
  return p;
}

// Maps a DomainError of PhysicalParams onto the field it names.
[[noreturn]] void params_fail(const Section& root, const std::string& what) {
  std::string field = "params";
  if (what.rfind("mu + mu'", 0) == 0 || what.rfind("mu must", 0) == 0)
    field = what.rfind("mu must", 0) == 0 ? "params.mu" : "params.mu_prime";
  else if (what.rfind("xi_bar", 0) == 0)
    field = "params.xi_bar";
  else if (what.rfind("positivity", 0) == 0)
    field = "params.m1";
  else if (what.find("pressure") != std::string::npos || what.rfind("P'(", 0) == 0)
    field = "params.pressure";
  root.fail(field, what);
}

Tolerances read_tolerances(Section& root) {
  Tolerances t;
  const json* j = root.child("tolerances");
  if (!j) return t;
  Section s(*j, "tolerances", root.locator());
  t.lin_tol = s.number("lin_tol", t.lin_tol);
  t.inv_tol = s.number("inv_tol", t.inv_tol);
  t.det_floor = s.number("det_floor", t.det_floor);
  t.mean_tol = s.number("mean_tol", t.mean_tol);
  s.finish();
  for (auto [name, v] : {std::pair{"lin_tol", t.lin_tol}, {"inv_tol", t.inv_tol}, {"mean_tol", t.mean_tol}})
    if (!(v > 0.0)) s.fail(std::string("tolerances.") + name, "must be > 0");
  if (!(t.det_floor > 0.0 && t.det_floor < 1.0)) s.fail("tolerances.det_floor", "must lie in (0, 1)");
  return t;
}

InitialData::Preset preset_from_string(const std::string& s, const Section& sec) {
  if (s == "steady") return InitialData::Preset::Steady;
  if (s == "fourier_perturbation") return InitialData::Preset::FourierPerturbation;
  if (s == "random_smooth") return InitialData::Preset::RandomSmooth;
  sec.fail("initial.preset", "unknown preset '" + s + "' (steady, fourier_perturbation, random_smooth)");
}

const char* preset_name(InitialData::Preset p) {
  switch (p) {
    case InitialData::Preset::Steady: return "steady";
    case InitialData::Preset::FourierPerturbation: return "fourier_perturbation";
    case InitialData::Preset::RandomSmooth: return "random_smooth";
  }
  return "steady";
}

InitialData read_initial(Section& root) {
  InitialData d;
  const json* j = root.child("initial");
  if (!j) return d;
  Section s(*j, "initial", root.locator());
  d.preset = preset_from_string(s.string("preset", "steady"), s);
  if (d.preset != InitialData::Preset::Steady && !s.has("amplitude"))
    s.fail("initial", "preset '" + std::string(preset_name(d.preset)) + "' needs an amplitude");
  d.amplitude = s.number("amplitude", 0.0);
  if (s.has("velocity_amplitude")) d.velocity_amplitude = s.number("velocity_amplitude", 0.0);
  if (s.has("density_amplitude")) d.density_amplitude = s.number("density_amplitude", 0.0);
  if (const json* mj = s.child("mode")) {
    if (!mj->is_array() || mj->size() != 2 || !(*mj)[0].is_number_integer() || !(*mj)[1].is_number_integer())
      s.fail("initial.mode", "expected [kx, ky] with integer entries");
    d.kx = (*mj)[0].get<int>();
    d.ky = (*mj)[1].get<int>();
  }
  d.seed = s.unsigned_integer("seed", d.seed);
  s.finish();
  return d;
}

}  // namespace

void validate_run_config(const RunConfig& c, const JsonLocator& where) {
  auto fail = [&](const std::string& path, const std::string& what) {
    throw ConfigError(path, where.line(path), what);
  };
  if (c.schema_version != kSchemaVersion) fail("schema_version", "unsupported version");
  Grid g = [&] {
    try {
      return Grid(c.grid.nx, c.grid.ny, c.grid.nz);
    } catch (const ResolutionError& e) {
      throw ConfigError("grid", where.line("grid"), e.what());
    }
  }();
  PhysicalParams p = c.params;
  p.model = model_of(c.mode);
  try {
    p.validate();
  } catch (const DomainError& e) {
    fail("params", e.what());
  }
  if (!(c.dt > 0.0)) fail("dt", "must be > 0");
  if (!(c.t_end >= 0.0)) fail("t_end", "must be >= 0");
  if (c.output_every < 1) fail("output_every", "must be >= 1");
  if (c.snapshot_every < 0) fail("snapshot_every", "must be >= 0");
  if (!(c.t_skip_fraction >= 0.0 && c.t_skip_fraction < 1.0)) fail("numerics.t_skip_fraction", "must lie in [0, 1)");
  if (!(c.blowup > 0.0)) fail("numerics.blowup", "must be > 0");

  const InitialData& d = c.initial;
  if (d.preset != InitialData::Preset::Steady) {
    if (!(d.amplitude > 0.0)) fail("initial.amplitude", "must be > 0");
    if (d.velocity_amplitude && !(*d.velocity_amplitude >= 0.0)) fail("initial.velocity_amplitude", "must be >= 0");
    if (d.density_amplitude && !(*d.density_amplitude >= 0.0)) fail("initial.density_amplitude", "must be >= 0");
  }
  if (d.preset == InitialData::Preset::FourierPerturbation) {
    if (d.kx == 0 && d.ky == 0) fail("initial.mode", "wavenumber (0, 0) is not a perturbation");
    if (2 * std::abs(d.kx) >= g.nx() || 2 * std::abs(d.ky) >= g.ny())
      fail("initial.mode", "wavenumber not resolved below the Nyquist frequency of the grid");
  }

  // boundary compatibilities and the density window on the actual data
  Field2D xi;
  Field3D v;
  initial_fields(d, c.mode, g, p, xi, v);
  double vmax = 0.0, top = 0.0, slope = 0.0;
  const int nz = g.nz();
  for (std::size_t col = 0; col < v.columns(); ++col) {
    const double* q = v.values().data() + col * nz;
    double dz0 = 0.0;
    for (int k = 0; k < nz; ++k) {
      vmax = std::max(vmax, std::abs(q[k]));
      dz0 += g.dz()(0, k) * q[k];
    }
    top = std::max(top, std::abs(q[nz - 1]));
    slope = std::max(slope, std::abs(dz0));
  }
  const double tol = 1e-12 * std::max(1.0, vmax);
  if (top > tol) fail("initial", "initial velocity does not vanish at the top boundary");
  if (slope > 1e3 * tol) fail("initial", "initial velocity has nonzero vertical derivative at the bottom");
  double lo = xi[0], hi = xi[0];
  for (double x : xi.values()) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (is_local(c.mode)) {
    if (lo < p.m1 || hi > p.m2)
      fail("initial", "initial surface density range [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "] leaves [M1, M2] = [" + std::to_string(p.m1) + ", " + std::to_string(p.m2) + "]");
  } else if (lo < 0.5 * p.xi_bar) {
    fail("initial", "initial surface density falls below xi_bar/2");
  }
}

RunConfig parse_run_config(const std::string& text) {
  json j = parse_json(text);
  JsonLocator loc(text);
  Section root(j, "", loc);
  RunConfig c;
  read_schema(root);
  const std::string mode = root.string("mode", to_string(c.mode));
  try {
    c.mode = mode_from_string(mode);
  } catch (const DomainError& e) {
    root.fail("mode", std::string(e.what()) + " (LocalGamma1, LocalGamma2, GlobalGamma1, GeneralNoGravity)");
  }
  c.grid = read_grid(root, c.grid);
  c.params = read_params(root, model_of(c.mode));
  try {
    c.params.validate();
  } catch (const DomainError& e) {
    params_fail(root, e.what());
  }
  c.dt = root.number("dt", c.dt);
  c.t_end = root.number("t_end", c.t_end);
  c.output_every = root.integer("output_every", c.output_every);
  c.initial = read_initial(root);
  c.tol = read_tolerances(root);
  if (const json* nj = root.child("numerics")) {
    Section s(*nj, "numerics", loc);
    c.dealias = s.boolean("dealias", c.dealias);
    c.t_skip_fraction = s.number("t_skip_fraction", c.t_skip_fraction);
    c.blowup = s.number("blowup", c.blowup);
    c.snapshot_every = s.integer("snapshot_every", c.snapshot_every);
    s.finish();
  }
  c.output_dir = root.string("output_dir", c.output_dir);
  root.finish();
  validate_run_config(c, loc);
  return c;
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string resolve_output_dir(const std::string& configured) {
  const char* env = std::getenv(kOutputDirEnv);
  return env && *env ? std::string(env) : configured;
}

RunConfig load_run_config(const std::string& path) {
  RunConfig c = parse_run_config(read_text_file(path));
  c.output_dir = resolve_output_dir(c.output_dir);
  return c;
}

std::string run_config_json(const RunConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["mode"] = to_string(c.mode);
  j["grid"] = {{"nx", c.grid.nx}, {"ny", c.grid.ny}, {"nz", c.grid.nz}};
  j["params"] = {{"mu", c.params.mu},
                 {"mu_prime", c.params.mu_prime},
                 {"xi_bar", c.params.xi_bar},
                 {"m1", c.params.m1},
                 {"m2", c.params.m2},
                 {"pressure", {{"coeffs", c.params.pressure.coeffs}, {"c1", c.params.pressure.c1}, {"c2", c.params.pressure.c2}}}};
  j["dt"] = c.dt;
  j["t_end"] = c.t_end;
  j["output_every"] = c.output_every;
  json init = {{"preset", preset_name(c.initial.preset)},
               {"amplitude", c.initial.amplitude},
               {"mode", {c.initial.kx, c.initial.ky}},
               {"seed", c.initial.seed}};
  if (c.initial.velocity_amplitude) init["velocity_amplitude"] = *c.initial.velocity_amplitude;
  if (c.initial.density_amplitude) init["density_amplitude"] = *c.initial.density_amplitude;
  j["initial"] = init;
  j["tolerances"] = {{"lin_tol", c.tol.lin_tol},
                     {"inv_tol", c.tol.inv_tol},
                     {"det_floor", c.tol.det_floor},
                     {"mean_tol", c.tol.mean_tol}};
  j["numerics"] = {{"dealias", c.dealias},
                   {"t_skip_fraction", c.t_skip_fraction},
                   {"blowup", c.blowup},
                   {"snapshot_every", c.snapshot_every}};
  j["output_dir"] = c.output_dir;
  return j.dump(2);
}

ResolventConfig parse_resolvent_config(const std::string& text) {
  json j = parse_json(text);
  JsonLocator loc(text);
  Section root(j, "", loc);
  ResolventConfig c;
  read_schema(root);
  c.grid = read_grid(root, c.grid);
  c.params = read_params(root, Model::Gamma1);
  try {
    c.params.validate();
  } catch (const DomainError& e) {
    params_fail(root, e.what());
  }
  if (const json* lj = root.child("lambda")) {
    if (lj->is_number()) {
      c.lambda = cplx(lj->get<double>(), 0.0);
    } else {
      Section s(*lj, "lambda", loc);
      c.lambda = cplx(s.number("re", 0.0), s.number("im", 0.0));
      s.finish();
    }
  }
  if (c.lambda.real() < 0.0) root.fail("lambda", "Re lambda must be >= 0");
  if (const json* rj = root.child("rhs")) {
    Section s(*rj, "rhs", loc);
    const std::string kind = s.string("kind", "manufactured");
    if (kind == "manufactured")
      c.rhs = ResolventConfig::Rhs::Manufactured;
    else if (kind == "zero")
      c.rhs = ResolventConfig::Rhs::Zero;
    else
      s.fail("rhs.kind", "unknown right-hand side '" + kind + "' (manufactured, zero)");
    c.seed = s.unsigned_integer("seed", c.seed);
    c.f1_mean = s.number("f1_mean", c.f1_mean);
    s.finish();
  }
  if (const json* tj = root.child("tolerances")) {
    Section s(*tj, "tolerances", loc);
    c.lin_tol = s.number("lin_tol", c.lin_tol);
    c.mean_tol = s.number("mean_tol", c.mean_tol);
    s.finish();
    if (!(c.lin_tol > 0.0)) s.fail("tolerances.lin_tol", "must be > 0");
    if (!(c.mean_tol > 0.0)) s.fail("tolerances.mean_tol", "must be > 0");
  }
  c.output_dir = root.string("output_dir", c.output_dir);
  root.finish();
  return c;
}

ResolventConfig load_resolvent_config(const std::string& path) {
  ResolventConfig c = parse_resolvent_config(read_text_file(path));
  c.output_dir = resolve_output_dir(c.output_dir);
  return c;
}

SpectrumConfig parse_spectrum_config(const std::string& text) {
  json j = parse_json(text);
  JsonLocator loc(text);
  Section root(j, "", loc);
  SpectrumConfig c;
  read_schema(root);
  c.grid = read_grid(root, c.grid);
  c.params = read_params(root, Model::Gamma1);
  try {
    c.params.validate_except_lame();
  } catch (const DomainError& e) {
    params_fail(root, e.what());
  }
  const std::string method = root.string("method", "dense");
  if (method == "dense")
    c.method = BoundMethod::Dense;
  else if (method == "per_mode")
    c.method = BoundMethod::PerMode;
  else
    root.fail("method", "unknown method '" + method + "' (dense, per_mode)");
  c.kmax = root.integer("kmax", c.kmax);
  if (c.kmax < 1) root.fail("kmax", "must be >= 1");
  c.output_dir = root.string("output_dir", c.output_dir);
  root.finish();
  if (c.method == BoundMethod::Dense && !dense_allowed(Grid(c.grid.nx, c.grid.ny, c.grid.nz)))
    root.fail("grid", "dense spectrum limited to 8x8x9; use method per_mode");
  return c;
}

SpectrumConfig load_spectrum_config(const std::string& path) {
  SpectrumConfig c = parse_spectrum_config(read_text_file(path));
  if (!c.output_dir.empty()) c.output_dir = resolve_output_dir(c.output_dir);
  return c;
}

}  // namespace hlcpe
