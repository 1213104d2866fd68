// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlcpe/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "hlcpe/norms.hpp"
#include "hlcpe/spectral.hpp"

namespace hlcpe {

double total_mass(const Field3D& rho, const Grid& g) {
  require_on_grid(rho, g, "total_mass");
  const int nz = g.nz();
  double s = 0.0;
  for (std::size_t col = 0; col < rho.columns(); ++col)
    for (int k = 0; k < nz; ++k) s += g.weights()[k] * rho[col * nz + k];
  return s / double(g.horizontal_nodes());
}

double lagrangian_mass(const LagrangianState& s, const Grid& g, const PhysicalParams& p) {
  Field2D xi = surface_density(s, p);
  double sum = 0.0;
  for (std::size_t n = 0; n < xi.size(); ++n) {
    double col;
    switch (s.mode) {
      case Mode::LocalGamma1:
      case Mode::GlobalGamma1: col = kDelta * xi[n]; break;
      case Mode::LocalGamma2: col = xi[n] + 0.25; break;
      default: col = xi[n];
    }
    sum += col * s.fm.det[n];
  }
  return sum / double(g.horizontal_nodes());
}

double internal_energy_density(double xi, const PhysicalParams& p) {
  switch (p.model) {
    case Model::Gamma1: return entropy_density(xi);
    case Model::GeneralNoGravity: return p.pressure.internal_energy(xi);
    case Model::Gamma2: return 0.0;
  }
  return 0.0;
}

namespace {

// Energy and dissipation densities summed over one column; grad[c][d] holds
// d v_c / d x_d at each level.
struct ColumnTerms {
  double e = 0.0, d = 0.0;
};

ColumnTerms column_terms(double xi, const double* vx, const double* vy, const double* grad[2][2],
                         const double* vzx, const double* vzy, const Grid& g, const PhysicalParams& p) {
  ColumnTerms out;
  const int nz = g.nz();
  double kin = 0.0, diss = 0.0;
  for (int k = 0; k < nz; ++k) {
    const double z = g.z(k), w = g.weights()[k];
    const double rho = p.model == Model::Gamma2 ? xi + 0.5 * z : xi;
    kin += w * 0.5 * rho * (vx[k] * vx[k] + vy[k] * vy[k]);
    double gh = 0.0;
    for (int c = 0; c < 2; ++c)
      for (int d = 0; d < 2; ++d) gh += grad[c][d][k] * grad[c][d][k];
    const double div = grad[0][0][k] + grad[1][1][k];
    const double vz2 = vzx[k] * vzx[k] + vzy[k] * vzy[k];
    if (p.model == Model::Gamma1) {
      const double a = 1.0 - kDelta * z;
      diss += w * (p.mu * gh / a + p.mu / (kDelta * kDelta) * a * vz2 + p.mu_prime * div * div / a);
    } else {
      diss += w * (p.mu * (gh + vz2) + p.mu_prime * div * div);
    }
  }
  out.e = kin + internal_energy_density(xi, p);
  out.d = diss;
  return out;
}

}  // namespace

EnergyValue energy(const Field2D& xi, const Field3D& v, const Grid& g, const PhysicalParams& p) {
  require_on_grid(xi, g, "energy");
  require_on_grid(v, g, "energy");
  for (double x : xi.values())
    if (!(x > 0.0)) throw DomainError("energy: surface density must be positive");
  Field3D grad = horizontal_derivatives(v, g).grad;
  Field3D vz = apply_vertical(g.dz(), v);
  EnergyValue ev;
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      const double* gp[2][2];
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) gp[c][d] = grad.column(2 * c + d, i, j);
      ColumnTerms t = column_terms(xi(0, i, j), v.column(0, i, j), v.column(1, i, j), gp, vz.column(0, i, j),
                                   vz.column(1, i, j), g, p);
      ev.energy += t.e;
      ev.dissipation += t.d;
    }
  const double inv = 1.0 / double(g.horizontal_nodes());
  ev.energy *= inv;
  ev.dissipation *= inv;
  return ev;
}

EnergyValue lagrangian_energy(const LagrangianState& s, const Grid& g, const PhysicalParams& p0) {
  PhysicalParams p = p0;
  p.model = model_of(s.mode);
  Field2D xi = surface_density(s, p);
  for (double x : xi.values())
    if (!(x > 0.0)) throw DomainError("energy: surface density must be positive");
  const int nz = g.nz();
  Field3D grady = horizontal_derivatives(s.v, g).grad;
  Field3D vz = apply_vertical(g.dz(), s.v);
  std::vector<double> gx(4 * std::size_t(nz));
  EnergyValue ev;
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      double z[2][2];
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) z[r][c] = s.fm.z(mat_index(r, c), i, j);
      // d v_c / d x_d at X = sum_j Z_jd d_j V_c
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d)
          for (int k = 0; k < nz; ++k)
            gx[(2 * c + d) * nz + k] =
                z[0][d] * grady(2 * c + 0, i, j, k) + z[1][d] * grady(2 * c + 1, i, j, k);
      const double* gp[2][2];
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) gp[c][d] = gx.data() + (2 * c + d) * nz;
      ColumnTerms t = column_terms(xi(0, i, j), s.v.column(0, i, j), s.v.column(1, i, j), gp, vz.column(0, i, j),
                                   vz.column(1, i, j), g, p);
      const double det = s.fm.det(0, i, j);
      ev.energy += det * t.e;
      ev.dissipation += det * t.d;
    }
  const double inv = 1.0 / double(g.horizontal_nodes());
  ev.energy *= inv;
  ev.dissipation *= inv;
  return ev;
}

DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y, double t_skip) {
  if (t.size() != y.size()) throw ShapeError("fit_decay_rate: series lengths differ");
  std::vector<double> xs, ys;
  for (std::size_t n = 0; n < t.size(); ++n) {
    if (t[n] < t_skip) continue;
    if (!(y[n] > 0.0)) throw DomainError("fit_decay_rate: norms must be positive");
    xs.push_back(t[n]);
    ys.push_back(std::log(y[n]));
  }
  if (xs.size() < 10) throw DomainError("fit_decay_rate: fewer than 10 samples in the tail window");
  const double n = double(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t q = 0; q < xs.size(); ++q) {
    mx += xs[q];
    my += ys[q];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t q = 0; q < xs.size(); ++q) {
    sxx += (xs[q] - mx) * (xs[q] - mx);
    sxy += (xs[q] - mx) * (ys[q] - my);
    syy += (ys[q] - my) * (ys[q] - my);
  }
  if (sxx == 0.0) throw DomainError("fit_decay_rate: degenerate time samples");
  const double slope = sxy / sxx;
  double sse = 0.0;
  for (std::size_t q = 0; q < xs.size(); ++q) {
    const double r = ys[q] - (my + slope * (xs[q] - mx));
    sse += r * r;
  }
  DecayFit f;
  f.eta = -slope;
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  f.samples = int(xs.size());
  return f;
}

PositivityReport positivity_report(const Field2D& xi, double lower, double upper) {
  PositivityReport r;
  r.min = r.max = xi.size() ? xi[0] : 0.0;
  for (double v : xi.values()) {
    r.min = std::min(r.min, v);
    r.max = std::max(r.max, v);
  }
  r.ok = r.min >= lower && r.max <= upper;
  return r;
}

PositivityReport positivity_report(const Field2D& xi, Mode mode, const PhysicalParams& p, double m1_star,
                                   double m2_star) {
  if (mode == Mode::GlobalGamma1) return positivity_report(xi, 0.5 * p.xi_bar, INFINITY);
  return positivity_report(xi, m1_star, m2_star);
}

const std::vector<std::string>& diagnostics_columns() {
  static const std::vector<std::string> cols{"t",      "mass",   "energy", "dissipation_integral",
                                             "zeta_m_norm", "v_norm", "min_xi", "max_xi",
                                             "min_det", "energy_residual"};
  return cols;
}

DiagnosticsRecorder::DiagnosticsRecorder(const Grid& g, const PhysicalParams& p) : g_(&g), p_(p) {}

DiagnosticsRow DiagnosticsRecorder::observe(const LagrangianState& s) {
  const Grid& g = *g_;
  PhysicalParams p = p_;
  p.model = model_of(s.mode);
  EnergyValue ev = lagrangian_energy(s, g, p);
  if (!started_) {
    started_ = true;
    e0_ = ev.energy;
    integral_ = 0.0;
  } else {
    integral_ += 0.5 * (s.t - t_prev_) * (d_prev_ + ev.dissipation);
  }
  t_prev_ = s.t;
  d_prev_ = ev.dissipation;

  DiagnosticsRow r;
  r.t = s.t;
  r.mass = lagrangian_mass(s, g, p);
  r.energy = ev.energy;
  r.dissipation_integral = integral_;
  Field2D zm = s.zeta;
  double mean = 0.0;
  for (double v : zm.values()) mean += v;
  mean /= double(zm.size());
  for (auto& v : zm.values()) v -= mean;
  r.zeta_m_norm = norm_h1(zm, g);
  r.v_norm = norm_l2(s.v, g);
  Field2D xi = surface_density(s, p);
  PositivityReport pr = positivity_report(xi, -INFINITY, INFINITY);
  r.min_xi = pr.min;
  r.max_xi = pr.max;
  r.min_det = s.fm.det[0];
  for (double d : s.fm.det.values()) r.min_det = std::min(r.min_det, d);
  r.energy_residual = ev.energy + integral_ - e0_;
  last_ = r;
  return r;
}

std::string diagnostics_csv(const std::vector<DiagnosticsRow>& rows) {
  std::string out;
  const auto& cols = diagnostics_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) out += (c ? "," : "") + cols[c];
  out += "\n";
  char buf[64];
  for (const auto& r : rows) {
    const double vals[] = {r.t,       r.mass,   r.energy, r.dissipation_integral, r.zeta_m_norm,
                           r.v_norm,  r.min_xi, r.max_xi, r.min_det,              r.energy_residual};
    for (std::size_t c = 0; c < std::size(vals); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", vals[c]);
      if (c) out += ",";
      out += buf;
    }
    out += "\n";
  }
  return out;
}

void write_diagnostics_csv(const std::vector<DiagnosticsRow>& rows, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << diagnostics_csv(rows);
}

}  // namespace hlcpe
