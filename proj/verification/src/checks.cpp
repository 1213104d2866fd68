// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlcpe/verification/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "hlcpe/diagnostics.hpp"
#include "hlcpe/flowmap.hpp"
#include "hlcpe/norms.hpp"
#include "hlcpe/operators.hpp"
#include "hlcpe/simulation.hpp"
#include "hlcpe/spectral.hpp"
#include "hlcpe/stokes.hpp"
#include "hlcpe/verification/oracle.hpp"

namespace hlcpe::verification {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

CheckResult result(bool pass, std::string detail) {
  CheckResult r;
  r.pass = pass;
  r.detail = std::move(detail);
  return r;
}

Field3D random_field3(const Grid& g, int ncomp, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Field3D f(g.nx(), g.ny(), g.nz(), ncomp);
  for (auto& v : f.values()) v = nd(rng);
  return f;
}

Field2D random_field2(const Grid& g, int ncomp, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Field2D f(g.nx(), g.ny(), ncomp);
  for (auto& v : f.values()) v = nd(rng);
  return f;
}

RunConfig base_run(Mode mode, int n, double dt, double t_end) {
  RunConfig c;
  c.mode = mode;
  c.grid = {n, n, 9};
  c.params.model = model_of(mode);
  c.dt = dt;
  c.t_end = t_end;
  c.output_every = 1;
  return c;
}

RunConfig fourier_run(Mode mode, int n, double dt, double t_end, double amplitude) {
  RunConfig c = base_run(mode, n, dt, t_end);
  c.initial.preset = InitialData::Preset::FourierPerturbation;
  c.initial.amplitude = amplitude;
  return c;
}

RunResult quiet_run(const RunConfig& c) {
  RunHooks h;
  h.write_files = false;
  return run_simulation(c, h);
}

bool rows_finite(const std::vector<DiagnosticsRow>& rows) {
  for (const auto& r : rows)
    for (double v : {r.t, r.mass, r.energy, r.dissipation_integral, r.zeta_m_norm, r.v_norm, r.min_xi, r.max_xi,
                     r.min_det, r.energy_residual})
      if (!std::isfinite(v)) return false;
  return true;
}

bool in_halving_band(double ratio) { return ratio >= 1.4 && ratio <= 2.6; }

// ---------------------------------------------------------------------------
// numbered criteria

CheckResult symbol_correctness(const CheckOptions& o) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  bool positive = true;
  int count = 0;
  for (int t = 0; t < 5; ++t) {
    const double mu = 0.1 + 2.9 * u(rng);
    const double mup = -0.95 * mu + (3.0 + 0.95 * mu) * u(rng);
    for (int kx = -8; kx <= 8; ++kx)
      for (int ky = -8; ky <= 8; ++ky) {
        const int k2 = kx * kx + ky * ky;
        if (k2 == 0 || k2 > 64) continue;
        const SymbolEigs s = lame_symbol_eigs(kx, ky, mu, mup);
        const Eigen::Vector2d k(kTwoPi * kx, kTwoPi * ky);
        const Eigen::Matrix2d m = mu * k.squaredNorm() * Eigen::Matrix2d::Identity() + mup * k * k.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
        const double lo = std::min(s.lambda1, s.lambda2), hi = std::max(s.lambda1, s.lambda2);
        worst = std::max(worst, std::abs(lo - es.eigenvalues()(0)) / std::abs(es.eigenvalues()(0)));
        worst = std::max(worst, std::abs(hi - es.eigenvalues()(1)) / std::abs(es.eigenvalues()(1)));
        positive = positive && s.lambda1 > 0.0 && s.lambda2 > 0.0;
        ++count;
      }
  }
  return result(worst <= 1e-12 * o.tolerance_scale && positive,
                fmt("%d symbols, max rel diff %.2e, eigenvalues positive: %s", count, worst, positive ? "yes" : "no"));
}

CheckResult operator_oracle(const CheckOptions& o) {
  Grid g(4, 4, 5);
  PhysicalParams p;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field2D xi0(4, 4, 1);
  for (auto& v : xi0.values()) v = 1.0 + 0.3 * u(rng);
  LameCoefficients c = LameCoefficients::hydrostatic(xi0, g);
  const Eigen::MatrixXd l = assemble_lame_dense(c, g, p);
  const Eigen::MatrixXd a = assemble_chs_dense(p.xi_bar, g, p);
  double worst_l = 0.0, worst_a = 0.0;
  for (int t = 0; t < 20; ++t) {
    Field3D v = random_field3(g, 2, rng);
    Field3D lv = apply_lame(v, c, g, p);
    Eigen::Map<const Eigen::VectorXd> vv(v.values().data(), Eigen::Index(v.size()));
    Eigen::Map<const Eigen::VectorXd> lvv(lv.values().data(), Eigen::Index(lv.size()));
    const Eigen::VectorXd ref = l * vv;
    worst_l = std::max(worst_l, (lvv - ref).norm() / ref.norm());

    ChsState s{random_field2(g, 1, rng), random_field3(g, 2, rng)};
    const Eigen::VectorXd x = pack(s);
    const Eigen::VectorXd ax = pack(apply_chs(s, p.xi_bar, g, p));
    const Eigen::VectorXd ref2 = a * x;
    worst_a = std::max(worst_a, (ax - ref2).norm() / ref2.norm());
  }
  const double tol = 1e-10 * o.tolerance_scale;
  return result(worst_l <= tol && worst_a <= tol,
                fmt("20 inputs at (4,4,5): A_HL rel %.2e, A_CHS rel %.2e", worst_l, worst_a));
}

CheckResult exponential_stability(const CheckOptions& o) {
  PhysicalParams p;
  const SpectralBound fine = spectral_bound(Grid(8, 8, 9), p, BoundMethod::Dense);
  const SpectralBound coarse = spectral_bound(Grid(6, 6, 7), p, BoundMethod::Dense);
  double max_re = -INFINITY;
  for (const cplx& e : fine.eigenvalues) max_re = std::max(max_re, e.real());
  const double drift = std::abs(fine.eta0 - coarse.eta0) / fine.eta0;

  Grid g(8, 8, 9);
  const Eigen::MatrixXd a = assemble_chs_dense(p.xi_bar, g, p);
  ChsState s{Field2D(8, 8, 1, 1.0), Field3D(8, 8, 9, 2)};
  const double null_res = (a * pack(s)).cwiseAbs().maxCoeff();

  const bool pass = fine.stable && std::abs(max_re + fine.eta0) <= 1e-12 * o.tolerance_scale &&
                    drift <= 0.2 && null_res <= 1e-13 * o.tolerance_scale;
  return result(pass, fmt("eta0(8,8,9) = %.10f, eta0(6,6,7) = %.10f, drift %.2e, max Re = %.10f, "
                          "|A (1,0)| = %.1e",
                          fine.eta0, coarse.eta0, drift, max_re, null_res));
}

CheckResult resolvent_solvability(const CheckOptions& o) {
  Grid g(8, 8, 9);
  PhysicalParams p;
  const double tol = 1e-8 * o.tolerance_scale;
  double worst_res = 0.0, worst_err = 0.0;
  for (cplx lambda : {cplx(0, 0), cplx(1, 0), cplx(0, 1), cplx(0, 10), cplx(0, 100)}) {
    ManufacturedResolvent m = manufactured_resolvent(lambda, g, p, 5);
    ResolventSolution s = solve_resolvent(m.problem, g, p);
    worst_res = std::max(worst_res, s.residual);
    double ez = 0.0, sz = 0.0, ev = 0.0, sv = 0.0;
    for (std::size_t n = 0; n < m.zeta.size(); ++n) {
      ez = std::max(ez, std::abs(s.zeta[n] - m.zeta[n]));
      sz = std::max(sz, std::abs(m.zeta[n]));
    }
    for (std::size_t n = 0; n < m.v.size(); ++n) {
      ev = std::max(ev, std::abs(s.v[n] - m.v[n]));
      sv = std::max(sv, std::abs(m.v[n]));
    }
    worst_err = std::max({worst_err, ez / sz, ev / sv});
  }

  bool rejected = false;
  {
    ManufacturedResolvent m = manufactured_resolvent(cplx(0, 0), g, p, 5);
    for (auto& v : m.problem.f1.values()) v += 1.0;
    try {
      solve_resolvent(m.problem, g, p);
    } catch (const CompatibilityError&) {
      rejected = true;
    }
  }

  ManufacturedResolvent m0 = manufactured_resolvent(cplx(0, 0), g, p, 9);
  Field2D f1(8, 8, 1);
  Field3D f2(8, 8, 9, 2);
  for (std::size_t n = 0; n < f1.size(); ++n) f1[n] = m0.problem.f1[n].real();
  for (std::size_t n = 0; n < f2.size(); ++n) f2[n] = m0.problem.f2[n].real();
  SteadySolution mono = solve_steady(f1, f2, g, p);
  SteadySolution dec = solve_steady_decomposed(f1, f2, g, p);
  double dz = 0.0, dv = 0.0, sz = 0.0, sv = 0.0;
  for (std::size_t n = 0; n < f1.size(); ++n) {
    dz = std::max(dz, std::abs(mono.zeta[n] - dec.zeta[n]));
    sz = std::max(sz, std::abs(mono.zeta[n]));
  }
  for (std::size_t n = 0; n < f2.size(); ++n) {
    dv = std::max(dv, std::abs(mono.v[n] - dec.v[n]));
    sv = std::max(sv, std::abs(mono.v[n]));
  }
  const double dec_err = std::max(dz / sz, dv / sv);

  SweepReport sw = imaginary_axis_resolvent_sweep(g, p);
  const bool pass = worst_res <= tol && worst_err <= tol && rejected && dec_err <= 1e-7 * o.tolerance_scale &&
                    sw.bounded && std::abs(sw.slope + 1.0) <= 0.1;
  return result(pass, fmt("residual %.2e, solution err %.2e, mean rejected: %s, decomposed vs monolithic %.2e "
                          "(%d iterations), sweep max ratio %.3f bounded: %s, slope %.4f",
                          worst_res, worst_err, rejected ? "yes" : "no", dec_err, dec.iterations, sw.max_ratio,
                          sw.bounded ? "yes" : "no", sw.slope));
}

CheckResult nonlinearity_correctness(const CheckOptions& o) {
  Grid g(16, 16, 9);
  PhysicalParams p;
  const double tol = 1e-6 * o.tolerance_scale;
  double worst = 0.0;
  bool detected = true;
  std::string per_mode;
  for (Mode m : {Mode::LocalGamma1, Mode::LocalGamma2, Mode::GlobalGamma1, Mode::GeneralNoGravity}) {
    double wm = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      OracleComparison c = compare_with_oracle(m, g, p, seed, o.mutation);
      wm = std::max({wm, c.f1_rel, c.f2_rel});
    }
    worst = std::max(worst, wm);
    const OracleComparison mut = compare_with_oracle(m, g, p, 0, F2Mutation::FlipVerticalAdvectionSign);
    detected = detected && mut.f2_rel > tol;
    per_mode += fmt("%s %.1e; ", to_string(m), wm);
  }
  return result(worst <= tol && detected,
                per_mode + fmt("sign-flip fixture detected: %s", detected ? "yes" : "no"));
}

CheckResult conservation_energy(const CheckOptions& o) {
  const double amp = 0.02;
  std::string detail;
  bool pass = true;
  for (Mode m : {Mode::LocalGamma1, Mode::LocalGamma2, Mode::GeneralNoGravity}) {
    RunConfig c1 = fourier_run(m, 16, 1e-3, 0.1, amp);
    RunConfig c2 = fourier_run(m, 16, 5e-4, 0.1, amp);
    c1.output_every = 100;
    c2.output_every = 200;
    RunResult r1 = quiet_run(c1), r2 = quiet_run(c2);
    if (r1.termination != Termination::Completed || r2.termination != Termination::Completed || r1.steps != 100)
      return result(false, std::string(to_string(m)) + ": run did not complete 100 steps");
    const double m0 = r1.rows.front().mass;
    const double d1 = std::abs(r1.rows.back().mass - m0) / m0;
    const double d2 = std::abs(r2.rows.back().mass - r2.rows.front().mass) / m0;
    const bool mass_ok = d1 <= 1e-6 * o.tolerance_scale && in_halving_band(d1 / d2);
    detail += fmt("%s mass drift %.2e ratio %.2f", to_string(m), d1, d1 / d2);
    pass = pass && mass_ok;
    if (m != Mode::LocalGamma2) {
      const double e1 = std::abs(r1.rows.back().energy_residual), e2 = std::abs(r2.rows.back().energy_residual);
      detail += fmt(", energy residual %.2e ratio %.2f", e1, e1 / e2);
      pass = pass && in_halving_band(e1 / e2);
    }
    detail += "; ";
  }
  return result(pass, detail);
}

CheckResult steady_fixed_point(const CheckOptions& o) {
  RunConfig c = base_run(Mode::GlobalGamma1, 16, 1e-2, 10.0);
  c.output_every = 10;
  RunResult r = quiet_run(c);
  double worst = 0.0;
  const double m0 = r.rows.front().mass;
  for (const auto& row : r.rows)
    worst = std::max({worst, row.zeta_m_norm, row.v_norm, std::abs(row.energy), std::abs(row.mass - m0),
                      std::abs(row.min_det - 1.0), std::abs(row.min_xi - 1.0), std::abs(row.max_xi - 1.0)});
  return result(r.termination == Termination::Completed && r.steps == 1000 && worst <= 1e-13 * o.tolerance_scale,
                fmt("%d steps, largest deviation %.2e", r.steps, worst));
}

CheckResult small_data_decay(const CheckOptions&) {
  PhysicalParams p;
  const double eta0 = spectral_bound(Grid(8, 8, 9), p, BoundMethod::Dense).eta0;
  RunConfig c = fourier_run(Mode::GlobalGamma1, 16, 0.02, 10.0, 1e-3);
  c.output_every = 5;
  RunResult r = quiet_run(c);
  if (r.termination != Termination::Completed || !r.fit) return result(false, "run did not complete: " + r.message);
  // envelope: maxima over consecutive windows of the tail strictly decrease
  std::vector<double> tail;
  bool positive = true;
  for (const auto& row : r.rows) {
    positive = positive && row.min_xi >= 0.5 * p.xi_bar;
    if (row.t >= r.t_skip) tail.push_back(row.zeta_m_norm + row.v_norm);
  }
  const int windows = 8;
  const std::size_t w = tail.size() / windows;
  bool monotone = w > 0;
  double prev = INFINITY;
  for (int k = 0; k < windows && w > 0; ++k) {
    const double mx = *std::max_element(tail.begin() + k * w, tail.begin() + (k + 1) * w);
    monotone = monotone && mx < prev;
    prev = mx;
  }
  const double q = r.fit->eta / eta0;
  return result(monotone && positive && q >= 0.5 && q <= 1.5,
                fmt("eta %.6f (R^2 %.6f), eta0 %.6f, ratio %.4f, envelope decreasing: %s, xi >= xi_bar/2: %s",
                    r.fit->eta, r.fit->r2, eta0, q, monotone ? "yes" : "no", positive ? "yes" : "no"));
}

CheckResult positivity_assumption(const CheckOptions&) {
  std::string detail;
  bool pass = true;
  for (Mode m : {Mode::LocalGamma1, Mode::LocalGamma2, Mode::GeneralNoGravity}) {
    for (int preset = 0; preset < 2; ++preset) {
      RunConfig c = fourier_run(m, 16, 1e-3, 0.2, 0.4);
      if (preset == 1) {
        c.initial.preset = InitialData::Preset::RandomSmooth;
        c.initial.amplitude = 0.3;
        c.initial.seed = 5;
      }
      c.params.m1 = 0.5;
      c.params.m2 = 2.0;
      c.output_every = 10;
      RunResult r = quiet_run(c);
      double lo = INFINITY, hi = -INFINITY;
      for (const auto& row : r.rows) {
        lo = std::min(lo, row.min_xi);
        hi = std::max(hi, row.max_xi);
      }
      const bool ok = r.termination == Termination::Completed && lo >= 0.25 && hi <= 4.0;
      pass = pass && ok;
      detail += fmt("%s/%s xi in [%.3f, %.3f]; ", to_string(m), preset ? "random" : "fourier", lo, hi);
    }
  }
  RunConfig big = fourier_run(Mode::LocalGamma1, 16, 1e-3, 1.0, 0.3);
  big.initial.velocity_amplitude = 20.0;
  RunResult r = quiet_run(big);
  const bool clean = r.termination != Termination::Completed && !r.message.empty() && rows_finite(r.rows);
  pass = pass && clean;
  detail += fmt("large data: %s at t = %.3f (%s)", to_string(r.termination), r.t, r.message.c_str());
  return result(pass, detail);
}

// Smooth divergent test velocity and its divergence.
void test_velocity(double x, double y, double out[2]) {
  out[0] = 0.2 * std::sin(kTwoPi * x) + 0.1 * std::cos(kTwoPi * y);
  out[1] = 0.1 * std::cos(kTwoPi * y) + 0.1 * std::sin(kTwoPi * x);
}
double test_divergence(double x, double y) {
  return 0.2 * kTwoPi * std::cos(kTwoPi * x) - 0.1 * kTwoPi * std::sin(kTwoPi * y);
}

Field2D sample_velocity(const Grid& g, double scale) {
  Field2D v(g.nx(), g.ny(), 2);
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      double u[2];
      test_velocity(g.x(i), g.y(j), u);
      v(0, i, j) = scale * u[0];
      v(1, i, j) = scale * u[1];
    }
  return v;
}

double wrap(double d) { return d - std::round(d); }

CheckResult flow_map_machinery(const CheckOptions& o) {
  Grid g(16, 16, 3);
  // roundtrip at small deformation
  FlowMap fm = FlowMap::identity(g);
  const Field2D v = sample_velocity(g, 0.05);
  for (int n = 0; n < 10; ++n) fm = advance_flow(fm, v, 0.01, g);
  FlowOptions tight;
  tight.inv_tol = 1e-14;
  const Field2D y = invert_map(fm, g, tight);
  Field2D dy(g.nx(), g.ny(), 2);  // Y - x, periodic
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      dy(0, i, j) = wrap(y(0, i, j) - g.x(i));
      dy(1, i, j) = wrap(y(1, i, j) - g.y(j));
    }
  const Field2D d_at_y = compose(fm.displacement, y, g);
  const Field2D xpos = shifted_nodes(fm.displacement, g);
  const Field2D dy_at_x = compose(dy, xpos, g);
  double xy = 0.0, yx = 0.0;
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      xy = std::max({xy, std::abs(wrap(y(0, i, j) + d_at_y(0, i, j) - g.x(i))),
                     std::abs(wrap(y(1, i, j) + d_at_y(1, i, j) - g.y(j)))});
      yx = std::max({yx, std::abs(wrap(xpos(0, i, j) + dy_at_x(0, i, j) - g.x(i))),
                     std::abs(wrap(xpos(1, i, j) + dy_at_x(1, i, j) - g.y(j)))});
    }
  const bool roundtrip = std::max(xy, yx) <= 1e-10 * o.tolerance_scale;

  // Neumann bound on random Jacobians up to |grad X - I| = 1/2
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd;
  bool neumann = true;
  double worst_ratio = 0.0;
  for (int t = 0; t < 200; ++t) {
    Field2D dev(1, 1, 4);
    for (auto& e : dev.values()) e = nd(rng);
    const double s = matrix_norm(dev)[0];
    const double target = 0.5 * (t + 1) / 200.0;
    for (auto& e : dev.values()) e *= target / s;
    Field2D jac = dev;
    jac[0] += 1.0;
    jac[3] += 1.0;
    Field2D zi = inverse_jacobian(jac).z;
    zi[0] -= 1.0;
    zi[3] -= 1.0;
    const double ratio = matrix_norm(zi)[0] / matrix_norm(dev)[0];
    worst_ratio = std::max(worst_ratio, ratio);
    neumann = neumann && ratio <= 2.0;
  }

  // Liouville: d det / dt = (div vbar)(X) det, forward difference residual
  auto liouville = [&](double dt) {
    FlowMap f = FlowMap::identity(g);
    const Field2D vel = sample_velocity(g, 1.0);
    double worst = 0.0;
    const int steps = int(std::lround(0.2 / dt));
    for (int n = 0; n < steps; ++n) {
      FlowMap next = advance_flow(f, vel, dt, g);
      for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j) {
          const double px = g.x(i) + f.displacement(0, i, j), py = g.y(j) + f.displacement(1, i, j);
          const double r = (next.det(0, i, j) - f.det(0, i, j)) / dt - test_divergence(px, py) * f.det(0, i, j);
          worst = std::max(worst, std::abs(r));
        }
      f = std::move(next);
    }
    return worst;
  };
  const double l1 = liouville(0.02), l2 = liouville(0.01);
  const bool first_order = in_halving_band(l1 / l2);
  return result(roundtrip && neumann && first_order,
                fmt("|X(Y) - id| %.1e, |Y(X) - id| %.1e; max |Z - I|/|grad X - I| = %.3f; Liouville residual "
                    "%.2e -> %.2e (ratio %.2f)",
                    xy, yx, worst_ratio, l1, l2, l1 / l2));
}

CheckResult determinism(const CheckOptions&) {
  RunConfig c = base_run(Mode::LocalGamma1, 16, 1e-3, 0.05);
  c.initial.preset = InitialData::Preset::RandomSmooth;
  c.initial.amplitude = 0.2;
  c.initial.seed = 42;
  const std::string a = diagnostics_csv(quiet_run(c).rows);
  const std::string b = diagnostics_csv(quiet_run(c).rows);
  c.initial.seed = 43;
  const std::string other = diagnostics_csv(quiet_run(c).rows);
  return result(a == b && a != other, fmt("%zu bytes, identical: %s, other seed differs: %s", a.size(),
                                          a == b ? "yes" : "no", a != other ? "yes" : "no"));
}

// ---------------------------------------------------------------------------
// module invariants

CheckResult grid_quadrature(const CheckOptions& o) {
  Grid g(4, 4, 9);
  double sum = 0.0;
  for (double w : g.weights()) sum += w;
  double quad = 0.0, diff = 0.0, integ = 0.0;
  for (int p = 0; p < g.nz(); ++p) {
    double q = 0.0;
    Eigen::VectorXd f(g.nz()), df(g.nz()), F(g.nz());
    for (int k = 0; k < g.nz(); ++k) {
      const double z = g.z(k);
      f(k) = std::pow(z, p);
      df(k) = p ? p * std::pow(z, p - 1) : 0.0;
      F(k) = std::pow(z, p + 1) / (p + 1);
      q += g.weights()[k] * f(k);
    }
    quad = std::max(quad, std::abs(q - 1.0 / (p + 1)));
    diff = std::max(diff, (g.dz() * f - df).cwiseAbs().maxCoeff());
    integ = std::max(integ, (g.integration() * f - F).cwiseAbs().maxCoeff());
  }
  const double tol = 1e-12 * o.tolerance_scale;
  return result(std::abs(sum - 1.0) <= tol && quad <= tol && diff <= 1e-10 * o.tolerance_scale && integ <= tol,
                fmt("weights sum - 1 = %.1e, quadrature %.1e, D_z %.1e, integration %.1e", sum - 1.0, quad, diff,
                    integ));
}

CheckResult transforms_roundtrip(const CheckOptions& o) {
  double worst = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double z = k / 100.0;
    worst = std::max(worst, std::abs(z_of_zprime(zprime_of_z(z)) - z));
  }
  const double tol = 1e-13 * o.tolerance_scale;
  return result(worst <= tol, fmt("z -> z' -> z max error %.1e", worst));
}

CheckResult structural_nonlinearity(const CheckOptions& o) {
  Grid g(8, 8, 9);
  PhysicalParams p;
  double worst = 0.0;
  for (Mode m : {Mode::LocalGamma1, Mode::LocalGamma2, Mode::GlobalGamma1, Mode::GeneralNoGravity}) {
    PhysicalParams pm = p;
    pm.model = model_of(m);
    InitialData d;
    d.preset = InitialData::Preset::FourierPerturbation;
    d.amplitude = 0.1;
    d.velocity_amplitude = 0.0;
    LagrangianState s = initial_state(d, m, g, pm);
    worst = std::max(worst, max_abs(nonlinearity_F1(s, g, pm)));  // V = 0
    // Z = I and zeta at baseline: F2 reduces to advection
    d.velocity_amplitude = 0.1;
    d.density_amplitude = 0.0;
    LagrangianState t = initial_state(d, m, g, pm);
    F2Terms terms = nonlinearity_F2_terms(t, Field3D(8, 8, 9, 2), g, pm);
    worst = std::max({worst, max_abs(terms.viscous_metric), max_abs(terms.lame_metric), max_abs(terms.time_lag)});
    if (m == Mode::GlobalGamma1) worst = std::max(worst, max_abs(terms.pressure));
  }
  LagrangianState zero = initial_state(InitialData{}, Mode::GlobalGamma1, g, p);
  worst = std::max(worst, max_abs(nonlinearity_F2(zero, Field3D(8, 8, 9, 2), g, p)));
  return result(worst <= 1e-14 * o.tolerance_scale, fmt("largest term that must vanish: %.1e", worst));
}

CheckResult vertical_velocity(const CheckOptions& o) {
  Grid g(16, 16, 9);
  PhysicalParams p;
  double bottom = 0.0, top = 0.0;
  for (Mode m : {Mode::LocalGamma1, Mode::LocalGamma2, Mode::GlobalGamma1, Mode::GeneralNoGravity}) {
    OracleCase oc = chain_rule_oracle(m, g, p, 3);
    PhysicalParams pm = p;
    pm.model = model_of(m);
    Field3D w = reconstruct_w(oc.state, g, pm);
    const double vn = norm_l2(oc.state.v, g);
    for (int i = 0; i < g.nx(); ++i)
      for (int j = 0; j < g.ny(); ++j) {
        bottom = std::max(bottom, std::abs(w(0, i, j, 0)));
        top = std::max(top, std::abs(w(0, i, j, g.nz() - 1)) / vn);
      }
  }
  return result(bottom == 0.0 && top <= 1e-8 * o.tolerance_scale,
                fmt("|W(z=0)| = %.1e, |W(z=1)|/|V| = %.1e", bottom, top));
}

CheckResult linear_decay(const CheckOptions&) {
  Grid g(4, 4, 5);
  PhysicalParams p;
  const double eta0 = spectral_bound(g, p, BoundMethod::Dense).eta0;
  const double eta = linear_decay_rate(g, p, 40.0, 3);
  const double rel = std::abs(eta / eta0 - 1.0);
  return result(rel <= 0.05, fmt("fitted %.6f vs eta0 %.6f (rel %.2e)", eta, eta0, rel));
}

CheckResult resolvent_linearity(const CheckOptions& o) {
  Grid g(8, 8, 9);
  PhysicalParams p;
  const cplx lambda(0.0, 3.0);
  ManufacturedResolvent a = manufactured_resolvent(lambda, g, p, 1), b = manufactured_resolvent(lambda, g, p, 2);
  const cplx al(0.7, -0.2), be(-1.3, 0.4);
  ResolventProblem c = a.problem;
  for (std::size_t n = 0; n < c.f1.size(); ++n) c.f1[n] = al * a.problem.f1[n] + be * b.problem.f1[n];
  for (std::size_t n = 0; n < c.f2.size(); ++n) c.f2[n] = al * a.problem.f2[n] + be * b.problem.f2[n];
  ResolventSolution sa = solve_resolvent(a.problem, g, p), sb = solve_resolvent(b.problem, g, p),
                    sc = solve_resolvent(c, g, p);
  double err = 0.0, scale = 0.0;
  for (std::size_t n = 0; n < sc.v.size(); ++n) {
    err = std::max(err, std::abs(sc.v[n] - (al * sa.v[n] + be * sb.v[n])));
    scale = std::max(scale, std::abs(sc.v[n]));
  }
  for (std::size_t n = 0; n < sc.zeta.size(); ++n) err = std::max(err, std::abs(sc.zeta[n] - (al * sa.zeta[n] + be * sb.zeta[n])));
  // zero right-hand side gives the zero solution
  ResolventProblem z = a.problem;
  for (auto& v : z.f1.values()) v = 0.0;
  for (auto& v : z.f2.values()) v = 0.0;
  ResolventSolution sz = solve_resolvent(z, g, p);
  double zero = 0.0;
  for (const cplx& v : sz.v.values()) zero = std::max(zero, std::abs(v));
  const double rel = err / scale;
  return result(rel <= 1e-10 * o.tolerance_scale && zero == 0.0,
                fmt("superposition error %.1e, zero data gives |V| = %.1e", rel, zero));
}

CheckResult decay_fit_synthetic(const CheckOptions& o) {
  std::vector<double> t, y, c;
  for (int k = 0; k < 100; ++k) {
    t.push_back(0.1 * k);
    y.push_back(2.5 * std::exp(-0.3 * t.back()));
    c.push_back(1.7);
  }
  DecayFit f = fit_decay_rate(t, y, 2.0);
  DecayFit fc = fit_decay_rate(t, c, 2.0);
  return result(std::abs(f.eta - 0.3) <= 1e-6 * o.tolerance_scale && f.r2 > 0.9999 && std::abs(fc.eta) <= 1e-12,
                fmt("eta %.9f R^2 %.9f, constant series eta %.1e", f.eta, f.r2, fc.eta));
}

CheckResult energy_floor(const CheckOptions&) {
  double lo = INFINITY;
  PhysicalParams p;
  p.model = Model::GeneralNoGravity;
  for (int k = 1; k <= 400; ++k) {
    const double xi = 0.01 * k;
    lo = std::min({lo, entropy_density(xi), p.pressure.internal_energy(xi)});
  }
  Grid g(8, 8, 9);
  PhysicalParams q;
  Field3D v(8, 8, 9, 2);
  for (std::size_t n = 0; n < v.size() / 2; ++n) v[n] = 0.3;
  const EnergyValue e0 = energy(Field2D(8, 8, 1, 1.0), Field3D(8, 8, 9, 2), g, q);
  const EnergyValue e1 = energy(Field2D(8, 8, 1, 1.0), v, g, q);
  return result(lo >= 0.0 && e0.energy == 0.0 && std::abs(e1.energy - 0.045) <= 1e-14,
                fmt("min e(xi) %.2e, E(1, 0) = %.1e, E(1, c) = %.15f", lo, e0.energy, e1.energy));
}

CheckResult step_convergence(const CheckOptions&) {
  // linear regime: tiny data, compared with exp(T A) on the reduced space
  Grid g(4, 4, 5);
  PhysicalParams p;
  InitialData d;
  d.preset = InitialData::Preset::FourierPerturbation;
  d.amplitude = 1e-7;
  const double horizon = 0.4;
  const Eigen::MatrixXd a = reduced_chs_dense(g, p);
  const int nz = g.nz(), m = nz - 2;
  auto reduce = [&](const LagrangianState& s) {
    const Eigen::Index nh = 16;
    Eigen::VectorXd x(nh + 32 * m);
    for (Eigen::Index n = 0; n < nh; ++n) x(n) = s.zeta[std::size_t(n)];
    for (int col = 0; col < 32; ++col)
      for (int k = 0; k < m; ++k) x(nh + col * m + k) = s.v[std::size_t(col) * nz + 1 + k];
    return x;
  };
  LagrangianState s0 = initial_state(d, Mode::GlobalGamma1, g, p);
  const Eigen::VectorXd exact = (horizon * a).exp() * reduce(s0);
  auto run = [&](double dt, double* first_norm) {
    StepOptions so;
    so.dt = dt;
    ImexStepper st(g, p, s0, so);
    LagrangianState s = s0;
    const int n = int(std::lround(horizon / dt));
    for (int k = 0; k < n; ++k) {
      s = st.step(s);
      if (k == 0 && first_norm) *first_norm = reduce(s).norm();
    }
    return (reduce(s) - exact).norm() / exact.norm();
  };
  double after_one = 0.0;
  const double e1 = run(0.02, &after_one), e2 = run(0.01, nullptr);
  const double before = reduce(s0).norm();
  const bool dissipative = after_one < before;
  return result(dissipative && e1 / e2 >= 1.6,
                fmt("error vs exp(TA): %.2e -> %.2e (ratio %.2f); norm after one step %.4e < %.4e", e1, e2,
                    e1 / e2, after_one, before));
}

CheckResult config_validation(const CheckOptions&) {
  int rejected = 0;
  const char* bad[] = {
      R"({"schema_version": 1, "dt": -1})",
      R"({"schema_version": 1, "tolerances": {"lin_tol": 1e-8, "det_flor": 0.1}})",
      R"({"schema_version": 2})",
      R"({"schema_version": 1, "mode": "LocalGamma1", "initial": {"preset": "fourier_perturbation", "amplitude": 0.9}})",
      R"({"schema_version": 1, "initial": {"preset": "random_smooth", "amplitude": 0}})",
  };
  std::string lines;
  for (const char* text : bad) {
    try {
      parse_run_config(text);
    } catch (const ConfigError& e) {
      ++rejected;
      lines += e.path() + " ";
    }
  }
  const RunConfig ok = parse_run_config(R"({"schema_version": 1})");
  return result(rejected == 5 && ok.mode == Mode::GlobalGamma1, fmt("rejected %d of 5 (%s)", rejected, lines.c_str()));
}

}  // namespace

double linear_decay_rate(const Grid& g, const PhysicalParams& p, double t_end, std::uint64_t seed) {
  const Eigen::MatrixXd a = reduced_chs_dense(g, p);
  const Eigen::MatrixXd q = deflation_basis(g);
  const Eigen::MatrixXd b = q.transpose() * a * q;
  const double dt = 0.1;
  const Eigen::MatrixXd e = (dt * b).exp();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXd x(b.rows());
  for (Eigen::Index n = 0; n < x.size(); ++n) x(n) = nd(rng);
  std::vector<double> ts, ys;
  const int steps = int(std::lround(t_end / dt));
  for (int k = 0; k <= steps; ++k) {
    ts.push_back(k * dt);
    ys.push_back(x.norm());
    x = e * x;
  }
  return fit_decay_rate(ts, ys, 0.2 * t_end).eta;
}

const std::vector<Check>& acceptance_checks() {
  static const std::vector<Check> checks{
      {"1", "symbol correctness", symbol_correctness},
      {"2", "operator oracle", operator_oracle},
      {"3", "exponential stability", exponential_stability},
      {"4", "resolvent solvability", resolvent_solvability},
      {"5", "nonlinearity correctness", nonlinearity_correctness},
      {"6", "conservation and energy", conservation_energy},
      {"7", "steady-state fixed point", steady_fixed_point},
      {"8", "small-data decay", small_data_decay},
      {"9", "positivity and terminal conditions", positivity_assumption},
      {"10", "flow-map machinery", flow_map_machinery},
      {"11", "determinism", determinism},
  };
  return checks;
}

const std::vector<Check>& module_checks() {
  static const std::vector<Check> checks{
      {"grid", "quadrature, differentiation, integration", grid_quadrature},
      {"transforms", "vertical coordinate roundtrip", transforms_roundtrip},
      {"evolve.structure", "nonlinearities vanish structurally", structural_nonlinearity},
      {"evolve.w", "vertical velocity boundary values", vertical_velocity},
      {"evolve.step", "dissipative first-order step", step_convergence},
      {"stokes.linearity", "resolvent superposition", resolvent_linearity},
      {"diagnostics.fit", "decay fit on exact exponentials", decay_fit_synthetic},
      {"diagnostics.linear", "linear decay recovers eta0", linear_decay},
      {"diagnostics.energy", "energy density floor", energy_floor},
      {"cli.config", "config validation", config_validation},
  };
  return checks;
}

CheckResult run_check(const Check& c, const CheckOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  try {
    r = c.run(opt);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.id = c.id;
  r.name = c.name;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace hlcpe::verification
