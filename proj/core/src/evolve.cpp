// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlcpe/evolve.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/LU>

#include "hlcpe/operators.hpp"
#include "hlcpe/spectral.hpp"

namespace hlcpe {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::LocalGamma1: return "LocalGamma1";
    case Mode::LocalGamma2: return "LocalGamma2";
    case Mode::GlobalGamma1: return "GlobalGamma1";
    case Mode::GeneralNoGravity: return "GeneralNoGravity";
  }
  return "unknown";
}

Mode mode_from_string(const std::string& s) {
  for (Mode m : {Mode::LocalGamma1, Mode::LocalGamma2, Mode::GlobalGamma1, Mode::GeneralNoGravity})
    if (s == to_string(m)) return m;
  throw DomainError("unknown mode '" + s + "'");
}

Model model_of(Mode m) {
  switch (m) {
    case Mode::LocalGamma1:
    case Mode::GlobalGamma1: return Model::Gamma1;
    case Mode::LocalGamma2: return Model::Gamma2;
    case Mode::GeneralNoGravity: return Model::GeneralNoGravity;
  }
  return Model::Gamma1;
}

Field2D surface_density(const LagrangianState& s, const PhysicalParams& p) {
  Field2D xi = s.zeta;
  if (s.mode == Mode::GlobalGamma1)
    for (auto& v : xi.values()) v += p.xi_bar;
  return xi;
}

Field3D F2Terms::total() const {
  Field3D t = viscous_metric;
  t += lame_metric;
  t += time_lag;
  t += advection;
  t += pressure;
  return t;
}

namespace {

using Mat2 = std::array<std::array<double, 2>, 2>;

// Dealiased copies of the inputs plus Z and dZ/dy_j.
struct Kinematics {
  Field2D zeta;
  Field3D v;
  Field2D z;      // 4 components
  Field2D dz[2];  // d Z / d y_j, 4 components each
};

Kinematics kinematics(const LagrangianState& s, const Grid& g, bool filter) {
  Kinematics k;
  k.zeta = filter ? dealias(s.zeta, g) : s.zeta;
  k.v = filter ? dealias(s.v, g) : s.v;
  Field2D gdev = filter ? dealias(s.fm.grad_dev, g) : s.fm.grad_dev;
  Field2D jac = gdev;
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      jac(0, i, j) += 1.0;
      jac(3, i, j) += 1.0;
    }
  k.z = inverse_jacobian(jac).z;
  Field2D dg = horizontal_derivatives(gdev, g).grad;  // entry e of G, direction d at 2e+d
  for (int d = 0; d < 2; ++d) {
    k.dz[d] = Field2D(g.nx(), g.ny(), 4);
    for (int i = 0; i < g.nx(); ++i)
      for (int j = 0; j < g.ny(); ++j) {
        Mat2 z{}, a{};
        for (int r = 0; r < 2; ++r)
          for (int c = 0; c < 2; ++c) {
            z[r][c] = k.z(mat_index(r, c), i, j);
            a[r][c] = dg(2 * mat_index(r, c) + d, i, j);
          }
        for (int r = 0; r < 2; ++r)
          for (int c = 0; c < 2; ++c) {
            double sum = 0.0;
            for (int m = 0; m < 2; ++m)
              for (int n = 0; n < 2; ++n) sum += z[r][m] * a[m][n] * z[n][c];
            k.dz[d](mat_index(r, c), i, j) = -sum;
          }
      }
  }
  return k;
}

Mat2 zmat(const Field2D& z, int i, int j) {
  Mat2 m{};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m[r][c] = z(mat_index(r, c), i, j);
  return m;
}

// sum_{ij} d_j V_i (Z_ji - delta_ji) for a 2-vector field given its gradient
double metric_div(const Mat2& z, const double grad[2][2]) {
  double s = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s += grad[j][i] * (z[j][i] - (i == j ? 1.0 : 0.0));
  return s;
}

double baseline_of(const LagrangianState& s, const PhysicalParams& p, int i, int j) {
  return s.mode == Mode::GlobalGamma1 ? p.xi_bar : s.xi0(0, i, j);
}

Field3D reconstruct_w_impl(const LagrangianState& s, const Kinematics& k, const Grid& g, const PhysicalParams& p) {
  const int nx = g.nx(), ny = g.ny(), nz = g.nz();
  Field2D xi = k.zeta;
  if (s.mode == Mode::GlobalGamma1)
    for (auto& v : xi.values()) v += p.xi_bar;
  for (double v : xi.values())
    if (!(v > 0.0)) throw DomainError("reconstruct_w: surface density must be positive");
  Field3D vt = k.v;  // V - Vbar, then xi (V - Vbar)
  Field2D vbar = vertical_average(k.v, g);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j)
        for (int l = 0; l < nz; ++l) vt(c, i, j, l) = xi(0, i, j) * (k.v(c, i, j, l) - vbar(c, i, j));
  Field3D dflux = horizontal_derivatives(vt, g).grad;
  const bool gamma2 = s.mode == Mode::LocalGamma2;
  Field3D dv;
  if (gamma2) dv = horizontal_derivatives(k.v, g).grad;
  Field3D q(nx, ny, nz, 1);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const Mat2 z = zmat(k.z, i, j);
      double avg = 0.0;
      std::vector<double> divx(nz, 0.0);
      for (int l = 0; l < nz; ++l) {
        double sum = 0.0, dsum = 0.0;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            sum += z[b][a] * dflux(2 * a + b, i, j, l);
            if (gamma2) dsum += z[b][a] * dv(2 * a + b, i, j, l);
          }
        q(0, i, j, l) = sum;
        divx[l] = dsum;
        avg += g.weights()[l] * g.z(l) * dsum;
      }
      if (gamma2)
        for (int l = 0; l < nz; ++l) q(0, i, j, l) += 0.5 * (g.z(l) * divx[l] - avg);
    }
  Field3D w = apply_vertical(g.integration(), q);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int l = 0; l < nz; ++l) {
        const double zl = g.z(l);
        double scale;
        switch (s.mode) {
          case Mode::LocalGamma1:
          case Mode::GlobalGamma1: scale = kDelta / ((1.0 - kDelta * zl) * xi(0, i, j)); break;
          case Mode::LocalGamma2: scale = 1.0 / (xi(0, i, j) + 0.5 * zl); break;
          default: scale = 1.0 / xi(0, i, j);
        }
        w(0, i, j, l) *= -scale;
      }
  return w;
}

}  // namespace

Field3D reconstruct_w(const LagrangianState& s, const Grid& g, const PhysicalParams& p) {
  return reconstruct_w_impl(s, kinematics(s, g, false), g, p);
}

Field2D nonlinearity_F1(const LagrangianState& s, const Grid& g, const PhysicalParams& p,
                        const NonlinearOptions& opt) {
  require_on_grid(s.zeta, g, "nonlinearity_F1");
  require_on_grid(s.v, g, "nonlinearity_F1");
  const Kinematics k = kinematics(s, g, opt.dealias);
  const int nx = g.nx(), ny = g.ny(), nz = g.nz();
  Field2D vbar = vertical_average(k.v, g);
  Field2D dvbar = horizontal_derivatives(vbar, g).grad;
  const bool gamma2 = s.mode == Mode::LocalGamma2;
  Field3D dv;
  if (gamma2) dv = horizontal_derivatives(k.v, g).grad;
  Field2D f(nx, ny, 1);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const Mat2 z = zmat(k.z, i, j);
      double grad[2][2];  // grad[j][i] = d_j Vbar_i
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) grad[b][a] = dvbar(2 * a + b, i, j);
      const double div = grad[0][0] + grad[1][1];
      const double zeta = k.zeta(0, i, j);
      double val;
      if (s.mode == Mode::GlobalGamma1) {
        val = -zeta * div - (zeta + p.xi_bar) * metric_div(z, grad);
      } else {
        val = -(zeta - s.xi0(0, i, j)) * div - zeta * metric_div(z, grad);
      }
      if (gamma2) {
        double acc = 0.0;
        for (int l = 0; l < nz; ++l) {
          double gl[2][2];
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) gl[b][a] = dv(2 * a + b, i, j, l);
          acc += g.weights()[l] * g.z(l) * metric_div(z, gl);
        }
        val -= 0.5 * acc;
      }
      f(0, i, j) = val;
    }
  return opt.dealias ? dealias(f, g) : f;
}

F2Terms nonlinearity_F2_terms(const LagrangianState& s, const Field3D& dtv, const Grid& g, const PhysicalParams& p,
                              const NonlinearOptions& opt) {
  require_on_grid(s.zeta, g, "nonlinearity_F2");
  require_on_grid(s.v, g, "nonlinearity_F2");
  require_on_grid(dtv, g, "nonlinearity_F2");
  const Kinematics k = kinematics(s, g, opt.dealias);
  const int nx = g.nx(), ny = g.ny(), nz = g.nz();
  const Mode mode = s.mode;

  SpectralField3D sv(k.v, g);
  const Field3D vd[2] = {sv.derivative(1, 0), sv.derivative(0, 1)};
  const Field3D vxx = sv.derivative(2, 0), vxy = sv.derivative(1, 1), vyy = sv.derivative(0, 2);
  const Field3D vz = apply_vertical(g.dz(), k.v);
  const Field2D dzeta = gradient(k.zeta, g);
  const Field2D vbar = vertical_average(k.v, g);
  const Field3D w = reconstruct_w_impl(s, k, g, p);

  F2Terms t;
  for (Field3D* f : {&t.viscous_metric, &t.lame_metric, &t.time_lag, &t.advection, &t.pressure})
    *f = Field3D(nx, ny, nz, 2);

  const double adv_sign = opt.mutation == F2Mutation::FlipAdvectionSign ? -1.0 : 1.0;
  const double vadv_sign = opt.mutation == F2Mutation::FlipVerticalAdvectionSign ? -1.0 : 1.0;
  const double p_sign = opt.mutation == F2Mutation::FlipPressureSign ? -1.0 : 1.0;

  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const Mat2 z = zmat(k.z, i, j);
      Mat2 dz[2];
      for (int d = 0; d < 2; ++d) dz[d] = zmat(k.dz[d], i, j);
      Mat2 zzt{};
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) zzt[a][b] = z[a][0] * z[b][0] + z[a][1] * z[b][1];
      const double zeta = k.zeta(0, i, j);
      const double base = baseline_of(s, p, i, j);
      const double xi = mode == Mode::GlobalGamma1 ? zeta + p.xi_bar : zeta;
      // Z^T grad zeta, and (Z - I)^T grad zeta
      double zg[2], zgd[2];
      for (int c = 0; c < 2; ++c) {
        zg[c] = z[0][c] * dzeta(0, i, j) + z[1][c] * dzeta(1, i, j);
        zgd[c] = zg[c] - dzeta(c, i, j);
      }
      for (int l = 0; l < nz; ++l) {
        const double zl = g.z(l);
        double vdd[2][2][2], vdv[2][2];  // vdd[a][b][c] = d_a d_b V_c, vdv[a][c] = d_a V_c
        for (int c = 0; c < 2; ++c) {
          vdd[0][0][c] = vxx(c, i, j, l);
          vdd[0][1][c] = vdd[1][0][c] = vxy(c, i, j, l);
          vdd[1][1][c] = vyy(c, i, j, l);
          vdv[0][c] = vd[0](c, i, j, l);
          vdv[1][c] = vd[1](c, i, j, l);
        }
        // coefficient h of the horizontal viscous terms, time-lag factor,
        // advection factor and vertical-advection scale
        double h, lag, adv, vscale, pres;
        switch (mode) {
          case Mode::LocalGamma1:
            h = 1.0 / ((1.0 - kDelta * zl) * base);
            lag = 1.0 - zeta / base;
            adv = zeta / base;
            vscale = (1.0 - kDelta * zl) / kDelta;
            break;
          case Mode::GlobalGamma1:
            h = 1.0 / ((1.0 - kDelta * zl) * base);
            lag = -zeta / base;
            adv = (zeta + base) / base;
            vscale = (1.0 - kDelta * zl) / kDelta;
            break;
          case Mode::LocalGamma2: {
            const double c0 = 1.0 / (base + 0.5 * zl), rho = zeta + 0.5 * zl;
            h = c0;
            lag = 1.0 - rho * c0;
            adv = rho * c0;
            vscale = 1.0;
            break;
          }
          default:
            h = 1.0 / base;
            lag = 1.0 - zeta / base;
            adv = zeta / base;
            vscale = 1.0;
        }
        for (int c = 0; c < 2; ++c) {
          // transformed Laplacian minus the plain one
          double lap = 0.0, lapy = vdd[0][0][c] + vdd[1][1][c];
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) lap += zzt[a][b] * vdd[a][b][c];
          for (int q = 0; q < 2; ++q)
            for (int a = 0; a < 2; ++a)
              for (int b = 0; b < 2; ++b) lap += z[a][q] * dz[a][b][q] * vdv[b][c];
          // transformed grad div minus the plain one
          double gd = 0.0, gdy = vdd[c][0][0] + vdd[c][1][1];
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
              for (int e = 0; e < 2; ++e) {
                gd += z[a][c] * z[b][e] * vdd[a][b][e];
                gd += z[a][c] * dz[a][b][e] * vdv[b][e];
              }
          // Vtilde . grad_x v at the particle
          double hadv = 0.0;
          for (int q = 0; q < 2; ++q) {
            const double vtq = k.v(q, i, j, l) - vbar(q, i, j);
            for (int a = 0; a < 2; ++a) hadv += vtq * z[a][q] * vdv[a][c];
          }
          const double vadv = vscale * w(0, i, j, l) * vz(c, i, j, l);

          switch (mode) {
            case Mode::LocalGamma1: pres = -zg[c] / base; break;
            case Mode::GlobalGamma1: pres = -zgd[c] / base; break;
            case Mode::LocalGamma2: pres = -h * (2.0 * zeta + zl) * zg[c]; break;
            default: pres = -p.pressure.dP(xi) * zg[c] / base;
          }
          t.viscous_metric(c, i, j, l) = h * p.mu * (lap - lapy);
          t.lame_metric(c, i, j, l) = h * p.mu_prime * (gd - gdy);
          t.time_lag(c, i, j, l) = lag * dtv(c, i, j, l);
          t.advection(c, i, j, l) = -adv_sign * adv * (hadv + vadv_sign * vadv);
          t.pressure(c, i, j, l) = p_sign * pres;
        }
      }
    }
  if (opt.dealias)
    for (Field3D* f : {&t.viscous_metric, &t.lame_metric, &t.time_lag, &t.advection, &t.pressure})
      *f = dealias(*f, g);
  return t;
}

Field3D nonlinearity_F2(const LagrangianState& s, const Field3D& dtv, const Grid& g, const PhysicalParams& p,
                        const NonlinearOptions& opt) {
  return nonlinearity_F2_terms(s, dtv, g, p, opt).total();
}

void check_state(const LagrangianState& s, const PhysicalParams& p, const StepOptions& opt) {
  if (!all_finite(s.zeta) || !all_finite(s.v) || !all_finite(s.fm.grad_dev))
    throw TerminalError(Termination::Blowup, "non-finite values at t = " + std::to_string(s.t));
  const double big = std::max(max_abs(s.zeta), max_abs(s.v));
  if (big > opt.blowup)
    throw TerminalError(Termination::Blowup, "state magnitude " + std::to_string(big) + " above blow-up threshold");
  Field2D xi = surface_density(s, p);
  double lo = xi[0], hi = xi[0];
  for (double v : xi.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (s.mode == Mode::GlobalGamma1) {
    if (lo < 0.5 * p.xi_bar)
      throw TerminalError(Termination::PositivityLost,
                          "xi = " + std::to_string(lo) + " < xi_bar/2: small-data lower bound violated");
  } else if (lo < opt.m1_star || hi > opt.m2_star) {
    throw TerminalError(Termination::PositivityLost, "xi outside [M1*, M2*] = [" + std::to_string(opt.m1_star) +
                                                         ", " + std::to_string(opt.m2_star) + "]: min " +
                                                         std::to_string(lo) + ", max " + std::to_string(hi));
  }
  InvertibilityReport r = check_invertibility(s.fm, opt.flow);
  if (!r.ok)
    throw TerminalError(Termination::MapNoninvertible,
                        "flow map: |grad X - I| = " + std::to_string(r.supnorm_dev) +
                            ", min det = " + std::to_string(r.min_det) + " (Neumann bound 1/2 or det floor violated)");
}

struct ImexStepper::Impl {
  Grid g;
  PhysicalParams p;
  Mode mode;
  StepOptions opt;
  Eigen::MatrixXd lift;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>> lu;  // per mode
  LameCoefficients coeffs;                                 // local modes
  Field2D xi0;
  int krylov_iterations = 0;

  Impl(const Grid& grid, const PhysicalParams& params, const LagrangianState& init, const StepOptions& o)
      : g(grid), p(params), mode(init.mode), opt(o), lift(lift_matrix(grid)), xi0(init.xi0) {
    if (!(opt.dt > 0.0)) throw DomainError("dt must be positive");
    PhysicalParams pm = p;
    pm.model = model_of(mode);
    if (mode == Mode::GlobalGamma1) {
      const VerticalProfile prof = VerticalProfile::horizontal_mean(LameCoefficients::hydrostatic(p.xi_bar, g));
      for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j) {
          Eigen::MatrixXcd a = -opt.dt * mode_chs_block(g, prof, p, p.xi_bar, 1.0 / p.xi_bar, i, j);
          a.diagonal().array() += 1.0;
          lu.emplace_back(a);
        }
    } else {
      coeffs = LameCoefficients::for_model(pm.model, xi0, g);
      const VerticalProfile prof = VerticalProfile::horizontal_mean(coeffs);
      for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j) {
          Eigen::MatrixXcd a = -opt.dt * mode_lame_block(g, prof, p, i, j);
          a.diagonal().array() += 1.0;
          lu.emplace_back(a);
        }
    }
  }

  Eigen::VectorXd interior(const Field3D& v) const {
    const int nz = g.nz(), m = nz - 2;
    Eigen::VectorXd x(Eigen::Index(v.columns()) * m);
    for (std::size_t col = 0; col < v.columns(); ++col)
      for (int q = 0; q < m; ++q) x(Eigen::Index(col) * m + q) = v[col * nz + q + 1];
    return x;
  }

  Field3D lifted(const Eigen::VectorXd& x) const {
    const int nz = g.nz(), m = nz - 2;
    Field3D v(g.nx(), g.ny(), nz, 2);
    for (std::size_t col = 0; col < v.columns(); ++col)
      Eigen::Map<Eigen::VectorXd>(v.values().data() + col * nz, nz) = lift * x.segment(Eigen::Index(col) * m, m);
    return v;
  }

  Eigen::VectorXd precondition(const Eigen::VectorXd& x) const {
    const int nz = g.nz(), m = nz - 2;
    CField3D hat = fft(lifted(x));
    for (int i = 0; i < g.nx(); ++i)
      for (int j = 0; j < g.ny(); ++j) {
        Eigen::VectorXcd r(2 * m);
        for (int c = 0; c < 2; ++c)
          for (int q = 0; q < m; ++q) r(c * m + q) = hat(c, i, j, q + 1);
        Eigen::VectorXcd y = lu[std::size_t(i) * g.ny() + j].solve(r);
        for (int c = 0; c < 2; ++c)
          Eigen::Map<Eigen::VectorXcd>(hat.column(c, i, j), nz) = lift.cast<cplx>() * y.segment(c * m, m);
      }
    return interior(ifft_real(hat));
  }

  Eigen::VectorXd apply_implicit(const Eigen::VectorXd& x) const {
    PhysicalParams pm = p;
    pm.model = model_of(mode);
    Field3D av = apply_lame(lifted(x), coeffs, g, pm);
    return x - opt.dt * interior(av);
  }

  void global_solve(const Field2D& zrhs, const Field3D& vrhs, Field2D& zeta, Field3D& v) const {
    const int nz = g.nz(), m = nz - 2;
    CField2D zh = fft(zrhs);
    CField3D vh = fft(vrhs);
    for (int i = 0; i < g.nx(); ++i)
      for (int j = 0; j < g.ny(); ++j) {
        Eigen::VectorXcd r(1 + 2 * m);
        r(0) = zh(0, i, j);
        for (int c = 0; c < 2; ++c)
          for (int q = 0; q < m; ++q) r(1 + c * m + q) = vh(c, i, j, q + 1);
        Eigen::VectorXcd y = lu[std::size_t(i) * g.ny() + j].solve(r);
        zh(0, i, j) = y(0);
        for (int c = 0; c < 2; ++c)
          Eigen::Map<Eigen::VectorXcd>(vh.column(c, i, j), nz) = lift.cast<cplx>() * y.segment(1 + c * m, m);
      }
    zeta = ifft_real(zh);
    v = ifft_real(vh);
  }
};

ImexStepper::ImexStepper(const Grid& g, const PhysicalParams& p, const LagrangianState& initial,
                         const StepOptions& opt)
    : impl_(std::make_unique<Impl>(g, p, initial, opt)) {}
ImexStepper::~ImexStepper() = default;
ImexStepper::ImexStepper(ImexStepper&&) noexcept = default;
ImexStepper& ImexStepper::operator=(ImexStepper&&) noexcept = default;

int ImexStepper::last_krylov_iterations() const { return impl_->krylov_iterations; }
const StepOptions& ImexStepper::options() const { return impl_->opt; }

LagrangianState ImexStepper::step(const LagrangianState& s) {
  Impl& m = *impl_;
  const Grid& g = m.g;
  const double dt = m.opt.dt;
  if (s.mode != m.mode) throw DomainError("state mode does not match the stepper");
  PhysicalParams pm = m.p;
  pm.model = model_of(s.mode);

  Field2D f1 = nonlinearity_F1(s, g, pm, m.opt.nonlinear);
  Field3D f2 = nonlinearity_F2(s, s.dtv, g, pm, m.opt.nonlinear);

  LagrangianState n;
  n.mode = s.mode;
  n.xi0 = s.xi0;
  Field3D vrhs = s.v;
  vrhs.axpy(dt, f2);
  if (s.mode == Mode::GlobalGamma1) {
    Field2D zrhs = s.zeta;
    zrhs.axpy(dt, f1);
    m.global_solve(zrhs, vrhs, n.zeta, n.v);
    m.krylov_iterations = 0;
  } else {
    GmresResult r = gmres([&](const Eigen::VectorXd& x) { return m.apply_implicit(x); },
                          [&](const Eigen::VectorXd& x) { return m.precondition(x); }, m.interior(vrhs),
                          m.interior(s.v), m.opt.gmres);
    m.krylov_iterations = r.iterations;
    if (!r.converged)
      throw ConvergenceError("implicit velocity solve: GMRES residual " + std::to_string(r.residual));
    n.v = m.lifted(r.x);
    Field2D div = divergence(vertical_average(n.v, g), g);
    if (s.mode == Mode::LocalGamma2) {
      Field3D zv = n.v;
      for (std::size_t col = 0; col < zv.columns(); ++col)
        for (int l = 0; l < g.nz(); ++l) zv[col * g.nz() + l] *= g.z(l);
      Field2D extra = divergence(vertical_average(zv, g), g);
      n.zeta = s.zeta;
      for (std::size_t q = 0; q < n.zeta.size(); ++q)
        n.zeta[q] += dt * (-s.xi0[q] * div[q] - 0.5 * extra[q] + f1[q]);
    } else {
      n.zeta = s.zeta;
      for (std::size_t q = 0; q < n.zeta.size(); ++q) n.zeta[q] += dt * (-s.xi0[q] * div[q] + f1[q]);
    }
  }
  n.dtv = n.v;
  n.dtv -= s.v;
  n.dtv *= 1.0 / dt;
  n.t = s.t + dt;
  n.steps = s.steps + 1;
  if (!all_finite(n.zeta) || !all_finite(n.v))
    throw TerminalError(Termination::Blowup, "non-finite values at t = " + std::to_string(n.t));
  try {
    n.fm = advance_flow_lagrangian(s.fm, vertical_average(s.v, g), vertical_average(n.v, g), dt, g, m.opt.flow);
  } catch (const SingularJacobianError& e) {
    throw TerminalError(Termination::MapNoninvertible, std::string("flow map: ") + e.what());
  }
  check_state(n, pm, m.opt);
  return n;
}

EulerianFields pull_back(const LagrangianState& s, const Grid& g, const PhysicalParams& p, const FlowOptions& opt) {
  PhysicalParams pm = p;
  pm.model = model_of(s.mode);
  Field2D y = invert_map(s.fm, g, opt);
  EulerianFields e;
  e.xi = compose(surface_density(s, pm), y, g);
  e.v = compose(s.v, y, g);
  e.w = compose(reconstruct_w(s, g, pm), y, g);
  e.rho = density_from_surface(e.xi, g, pm, VerticalCoordinate::Transformed);
  return e;
}

LagrangianState make_state(Mode mode, const Field2D& xi, const Field3D& v, const Grid& g, const PhysicalParams& p) {
  require_on_grid(xi, g, "make_state");
  require_on_grid(v, g, "make_state");
  if (xi.ncomp() != 1 || v.ncomp() != 2) throw ShapeError("make_state expects scalar xi and 2-vector v");
  LagrangianState s;
  s.mode = mode;
  s.v = v;
  s.fm = FlowMap::identity(g);
  s.dtv = Field3D(g.nx(), g.ny(), g.nz(), 2);
  if (mode == Mode::GlobalGamma1) {
    s.zeta = xi;
    for (auto& z : s.zeta.values()) z -= p.xi_bar;
    s.xi0 = Field2D(g.nx(), g.ny(), 1, p.xi_bar);
  } else {
    s.zeta = xi;
    s.xi0 = xi;
  }
  return s;
}

void initial_fields(const InitialData& d, Mode mode, const Grid& g, const PhysicalParams& p, Field2D& xi,
                    Field3D& v) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const int nx = g.nx(), ny = g.ny(), nz = g.nz();
  xi = Field2D(nx, ny, 1, p.xi_bar);
  v = Field3D(nx, ny, nz, 2);
  (void)mode;
  switch (d.preset) {
    case InitialData::Preset::Steady: break;
    case InitialData::Preset::FourierPerturbation: {
      const double da = d.density_amplitude.value_or(d.amplitude);
      const double va = d.velocity_amplitude.value_or(d.amplitude);
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
          const double th = two_pi * (d.kx * g.x(i) + d.ky * g.y(j));
          xi(0, i, j) = p.xi_bar * (1.0 + da * std::cos(th));
          for (int l = 0; l < nz; ++l) {
            const double prof = 1.0 - g.z(l) * g.z(l);
            v(0, i, j, l) = va * prof * std::sin(th);
            v(1, i, j, l) = va * prof * std::cos(th);
          }
        }
      break;
    }
    case InitialData::Preset::RandomSmooth: {
      std::mt19937_64 rng(d.seed);
      std::normal_distribution<double> nd;
      Field2D pert(nx, ny, 1);
      Field3D vel(nx, ny, nz, 2);
      auto profile = [](int r, double z) {
        switch (r) {
          case 0: return 1.0 - z * z;
          case 1: return z * z - z * z * z * z;
          default: return 1.0 - z * z * z;
        }
      };
      for (int kx = -2; kx <= 2; ++kx)
        for (int ky = -2; ky <= 2; ++ky) {
          if ((kx == 0 && ky == 0) || kx * kx + ky * ky > 4) continue;
          const double ac = nd(rng), as = nd(rng);
          double vc[2][3], vs[2][3];
          for (int c = 0; c < 2; ++c)
            for (int r = 0; r < 3; ++r) {
              vc[c][r] = nd(rng);
              vs[c][r] = nd(rng);
            }
          for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j) {
              const double th = two_pi * (kx * g.x(i) + ky * g.y(j));
              const double cs = std::cos(th), sn = std::sin(th);
              pert(0, i, j) += ac * cs + as * sn;
              for (int c = 0; c < 2; ++c)
                for (int l = 0; l < nz; ++l)
                  for (int r = 0; r < 3; ++r)
                    vel(c, i, j, l) += (vc[c][r] * cs + vs[c][r] * sn) * profile(r, g.z(l));
            }
        }
      const double pa = d.density_amplitude.value_or(d.amplitude) / std::max(max_abs(pert), 1e-300);
      const double va = d.velocity_amplitude.value_or(d.amplitude) / std::max(max_abs(vel), 1e-300);
      for (std::size_t q = 0; q < xi.size(); ++q) xi[q] = p.xi_bar * (1.0 + pa * pert[q]);
      for (std::size_t q = 0; q < v.size(); ++q) v[q] = va * vel[q];
      break;
    }
  }
}

LagrangianState initial_state(const InitialData& d, Mode mode, const Grid& g, const PhysicalParams& p) {
  Field2D xi;
  Field3D v;
  initial_fields(d, mode, g, p, xi, v);
  return make_state(mode, xi, v, g, p);
}

}  // namespace hlcpe
