// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlcpe/verification/oracle.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "hlcpe/flowmap.hpp"
#include "hlcpe/verification/jet.hpp"

namespace hlcpe::verification {

namespace {

// Random series over 0 < |k|^2 <= 2 with sum |coefficient| = scale.
TrigSeries random_series(std::mt19937_64& rng, double scale, bool with_mean = false) {
  std::normal_distribution<double> nd;
  TrigSeries s;
  double total = 0.0;
  for (int kx = -1; kx <= 1; ++kx)
    for (int ky = 0; ky <= 1; ++ky) {
      if (ky == 0 && kx < 0) continue;
      if (kx == 0 && ky == 0 && !with_mean) continue;
      const double a = nd(rng), b = (kx == 0 && ky == 0) ? 0.0 : nd(rng);
      s.terms.push_back({kx, ky, a, b});
      total += std::abs(a) + std::abs(b);
    }
  for (auto& t : s.terms) {
    t.a *= scale / total;
    t.b *= scale / total;
  }
  return s;
}

// Same with |grad| bounded by scale.
TrigSeries random_displacement(std::mt19937_64& rng, double scale) {
  TrigSeries s = random_series(rng, 1.0);
  double bound = 0.0;
  for (const auto& t : s.terms)
    bound += 2.0 * std::numbers::pi * std::hypot(t.kx, t.ky) * (std::abs(t.a) + std::abs(t.b));
  for (auto& t : s.terms) {
    t.a *= scale / bound;
    t.b *= scale / bound;
  }
  return s;
}

// Boundary-compatible vertical profiles: P(1) = 0, P'(0) = 0.
const std::vector<Poly>& profiles() {
  static const std::vector<Poly> p{{{1.0, 0.0, -1.0}}, {{0.0, 0.0, 1.0, 0.0, -1.0}}, {{1.0, 0.0, 0.0, -1.0}}};
  return p;
}

struct Mat {
  Jet m[2][2];
};

}  // namespace

OracleCase chain_rule_oracle(Mode mode, const Grid& g, const PhysicalParams& p0, std::uint64_t seed,
                             const OracleOptions& opt) {
  PhysicalParams p = p0;
  p.model = model_of(mode);
  std::mt19937_64 rng(seed * 7919 + 17);
  const bool global = mode == Mode::GlobalGamma1;
  const int nx = g.nx(), ny = g.ny(), nz = g.nz();
  const auto& prof = profiles();
  const int nr = int(prof.size());

  TrigSeries disp[2] = {random_displacement(rng, opt.displacement), random_displacement(rng, opt.displacement)};
  TrigSeries base = random_series(rng, 0.1);      // xi0 - 1 for local modes
  TrigSeries pert = random_series(rng, opt.perturbation);
  std::vector<TrigSeries> a(2 * nr), lag(2 * nr);  // index 2r + c
  for (auto& s : a) s = random_series(rng, opt.velocity);
  for (auto& s : lag) s = random_series(rng, opt.velocity);

  OracleCase out;
  LagrangianState& s = out.state;
  s.mode = mode;
  s.zeta = Field2D(nx, ny, 1);
  s.xi0 = Field2D(nx, ny, 1, p.xi_bar);
  s.v = Field3D(nx, ny, nz, 2);
  s.dtv = Field3D(nx, ny, nz, 2);
  s.fm = FlowMap::identity(g);
  out.dtv = Field3D(nx, ny, nz, 2);
  out.f1 = Field2D(nx, ny, 1);
  out.f2 = Field3D(nx, ny, nz, 2);

  std::vector<double> pbar(nr), pz1(nr);
  std::vector<Poly> dprof(nr), iprof(nr), izprof(nr);
  for (int r = 0; r < nr; ++r) {
    pbar[r] = prof[r].integral01();
    pz1[r] = prof[r].times_z().integral01();
    dprof[r] = prof[r].derivative();
    iprof[r] = prof[r].antiderivative();
    izprof[r] = prof[r].times_z().antiderivative();
  }

  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const double y1 = g.x(i), y2 = g.y(j);
      // Jacobian and its inverse as jets; Z's derivatives come from the
      // arithmetic, not from a closed form.
      Jet2 dj[2] = {disp[0].eval(y1, y2), disp[1].eval(y1, y2)};
      Mat jac, z;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
          jac.m[r][c] = dj[r].partial(c);
          if (r == c) jac.m[r][c].v += 1.0;
        }
      const Jet det = jac.m[0][0] * jac.m[1][1] - jac.m[0][1] * jac.m[1][0];
      z.m[0][0] = jac.m[1][1] / det;
      z.m[0][1] = -jac.m[0][1] / det;
      z.m[1][0] = -jac.m[1][0] / det;
      z.m[1][1] = jac.m[0][0] / det;

      for (int c = 0; c < 2; ++c) {
        s.fm.displacement(c, i, j) = dj[c].v;
        for (int d = 0; d < 2; ++d) s.fm.grad_dev(mat_index(c, d), i, j) = dj[c].d[d];
      }

      // d/dx_i of a first-order jet (value only) and of a second-order one
      // (as a jet).
      auto dx = [&](int k, const Jet& f) { return z.m[0][k].v * f.d[0] + z.m[1][k].v * f.d[1]; };
      auto dxj = [&](int k, const Jet2& f) { return z.m[0][k] * f.partial(0) + z.m[1][k] * f.partial(1); };

      Jet2 b2 = base.eval(y1, y2);
      b2.v += 1.0;
      const double xi0 = global ? p.xi_bar : b2.v;
      Jet2 pz = pert.eval(y1, y2);
      Jet2 zeta2 = pz;  // zeta as an analytic field
      if (!global) zeta2.axpy(1.0, b2);
      const double zeta = zeta2.v;
      const double xi = global ? zeta + p.xi_bar : zeta;
      Jet2 xi2 = zeta2;
      if (global) xi2.v += p.xi_bar;
      s.zeta(0, i, j) = zeta;
      if (!global) s.xi0(0, i, j) = xi0;

      Jet2 ar[3][2];
      for (int r = 0; r < nr; ++r)
        for (int c = 0; c < 2; ++c) ar[r][c] = a[2 * r + c].eval(y1, y2);

      // continuity
      Jet2 vbar[2];
      for (int c = 0; c < 2; ++c)
        for (int r = 0; r < nr; ++r) vbar[c].axpy(pbar[r], ar[r][c]);
      const double divx_bar = dx(0, vbar[0].jet()) + dx(1, vbar[1].jet());
      const double divy_bar = vbar[0].d[0] + vbar[1].d[1];
      double zdivx = 0.0, zdivy = 0.0;  // int z div V dz
      std::vector<double> divx_r(nr);
      for (int r = 0; r < nr; ++r) {
        divx_r[r] = dx(0, ar[r][0].jet()) + dx(1, ar[r][1].jet());
        zdivx += pz1[r] * divx_r[r];
        zdivy += pz1[r] * (ar[r][0].d[0] + ar[r][1].d[1]);
      }
      double full1 = -xi * divx_bar, lin1 = -xi0 * divy_bar;
      if (mode == Mode::LocalGamma2) {
        full1 -= 0.5 * zdivx;
        lin1 -= 0.5 * zdivy;
      }
      out.f1(0, i, j) = full1 - lin1;

      // div_x (xi a_r) for the vertical velocity
      std::vector<double> div_xi_a(nr);
      for (int r = 0; r < nr; ++r) {
        double sum = 0.0;
        for (int c = 0; c < 2; ++c) {
          Jet prod = xi2.jet() * ar[r][c].jet();
          sum += dx(c, prod);
        }
        div_xi_a[r] = sum;
      }

      for (int l = 0; l < nz; ++l) {
        const double zl = g.z(l);
        Jet2 v2[2], dt2[2];
        double vz[2] = {0.0, 0.0};
        for (int c = 0; c < 2; ++c)
          for (int r = 0; r < nr; ++r) {
            v2[c].axpy(prof[r](zl), ar[r][c]);
            dt2[c].axpy(prof[r](zl), lag[2 * r + c].eval(y1, y2));
            vz[c] += dprof[r](zl) * ar[r][c].v;
          }
        for (int c = 0; c < 2; ++c) {
          s.v(c, i, j, l) = v2[c].v;
          out.dtv(c, i, j, l) = dt2[c].v;
        }

        // vertical velocity from the exact z-integrals
        double integ = 0.0;
        for (int r = 0; r < nr; ++r) integ += (iprof[r](zl) - zl * pbar[r]) * div_xi_a[r];
        double w;
        switch (mode) {
          case Mode::LocalGamma1:
          case Mode::GlobalGamma1: w = -kDelta / ((1.0 - kDelta * zl) * xi) * integ; break;
          case Mode::LocalGamma2: {
            double extra = 0.0;
            for (int r = 0; r < nr; ++r) extra += (izprof[r](zl) - zl * pz1[r]) * divx_r[r];
            w = -(integ + 0.5 * extra) / (zeta + 0.5 * zl);
            break;
          }
          default: w = -integ / xi;
        }

        double h, ratio, vscale;
        switch (mode) {
          case Mode::LocalGamma1:
          case Mode::GlobalGamma1:
            h = 1.0 / ((1.0 - kDelta * zl) * xi0);
            ratio = xi / xi0;
            vscale = (1.0 - kDelta * zl) / kDelta;
            break;
          case Mode::LocalGamma2:
            h = 1.0 / (xi0 + 0.5 * zl);
            ratio = (zeta + 0.5 * zl) * h;
            vscale = 1.0;
            break;
          default:
            h = 1.0 / xi0;
            ratio = xi / xi0;
            vscale = 1.0;
        }

        // x-derivatives of V as jets, then second derivatives
        Jet dv[2][2];  // dv[c][k] = d V_c / d x_k
        for (int c = 0; c < 2; ++c)
          for (int k = 0; k < 2; ++k) dv[c][k] = dxj(k, v2[c]);
        const Jet divx = dv[0][0] + dv[1][1];
        const double gxi[2] = {dx(0, xi2.jet()), dx(1, xi2.jet())};
        double vt[2];
        for (int q = 0; q < 2; ++q) vt[q] = v2[q].v - vbar[q].v;

        for (int c = 0; c < 2; ++c) {
          const double lapx = dx(0, dv[c][0]) + dx(1, dv[c][1]);
          const double graddivx = dx(c, divx);
          const double lapy = v2[c].h[0][0] + v2[c].h[1][1];
          const double graddivy = v2[0].h[c][0] + v2[1].h[c][1];
          const double hadv = vt[0] * dv[c][0].v + vt[1] * dv[c][1].v;
          double pres_full, pres_lin = 0.0;
          switch (mode) {
            case Mode::LocalGamma1: pres_full = -gxi[c] / xi0; break;
            case Mode::GlobalGamma1:
              pres_full = -gxi[c] / xi0;
              pres_lin = -xi2.d[c] / xi0;
              break;
            case Mode::LocalGamma2: pres_full = -h * (2.0 * zeta + zl) * gxi[c]; break;
            default: pres_full = -p.pressure.dP(xi) * gxi[c] / xi0;
          }
          const double full = h * (p.mu * lapx + p.mu_prime * graddivx) - ratio * (hadv + vscale * w * vz[c]) +
                              pres_full + (1.0 - ratio) * dt2[c].v;
          const double lin = h * (p.mu * lapy + p.mu_prime * graddivy) + pres_lin;
          out.f2(c, i, j, l) = full - lin;
        }
      }
    }
  InverseJacobian inv = inverse_jacobian(s.fm.jacobian());
  s.fm.z = inv.z;
  s.fm.det = inv.det;
  s.dtv = out.dtv;
  return out;
}

OracleComparison compare_with_oracle(Mode mode, const Grid& g, const PhysicalParams& p0, std::uint64_t seed,
                                     F2Mutation mutation, const OracleOptions& opt) {
  PhysicalParams p = p0;
  p.model = model_of(mode);
  OracleCase oc = chain_rule_oracle(mode, g, p, seed, opt);
  NonlinearOptions no;
  no.dealias = false;
  no.mutation = mutation;
  Field2D f1 = nonlinearity_F1(oc.state, g, p, no);
  Field3D f2 = nonlinearity_F2(oc.state, oc.dtv, g, p, no);
  auto rel = [](const auto& a, const auto& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
      num = std::max(num, std::abs(a[n] - b[n]));
      den = std::max(den, std::abs(b[n]));
    }
    return den > 0.0 ? num / den : num;
  };
  OracleComparison c{mode, seed};
  c.f1_rel = rel(f1, oc.f1);
  c.f2_rel = rel(f2, oc.f2);
  return c;
}

}  // namespace hlcpe::verification
