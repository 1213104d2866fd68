// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlcpe/stokes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <type_traits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "hlcpe/norms.hpp"
#include "hlcpe/spectral.hpp"

namespace hlcpe {

namespace {

bool null_mode(const Grid& g, int i, int j) { return g.dx_symbol(i) == 0.0 && g.dy_symbol(j) == 0.0; }

VerticalProfile global_profile(double xi_bar, const Grid& g) {
  return VerticalProfile::horizontal_mean(LameCoefficients::hydrostatic(xi_bar, g));
}

Field2D real_part(const CField2D& f) {
  Field2D r(f.nx(), f.ny(), f.ncomp());
  for (std::size_t n = 0; n < f.size(); ++n) r[n] = f[n].real();
  return r;
}
Field2D imag_part(const CField2D& f) {
  Field2D r(f.nx(), f.ny(), f.ncomp());
  for (std::size_t n = 0; n < f.size(); ++n) r[n] = f[n].imag();
  return r;
}
Field3D real_part(const CField3D& f) {
  Field3D r(f.nx(), f.ny(), f.nz(), f.ncomp());
  for (std::size_t n = 0; n < f.size(); ++n) r[n] = f[n].real();
  return r;
}
Field3D imag_part(const CField3D& f) {
  Field3D r(f.nx(), f.ny(), f.nz(), f.ncomp());
  for (std::size_t n = 0; n < f.size(); ++n) r[n] = f[n].imag();
  return r;
}
template <class F>
auto to_complex(const F& f) {
  if constexpr (std::is_same_v<F, Field2D>) {
    CField2D c(f.nx(), f.ny(), f.ncomp());
    for (std::size_t n = 0; n < f.size(); ++n) c[n] = f[n];
    return c;
  } else {
    CField3D c(f.nx(), f.ny(), f.nz(), f.ncomp());
    for (std::size_t n = 0; n < f.size(); ++n) c[n] = f[n];
    return c;
  }
}

cplx mean_of(const CField2D& f) {
  cplx s = 0.0;
  for (std::size_t n = 0; n < f.slice_size(); ++n) s += f[n];
  return s / double(f.slice_size());
}

void check_problem(const ResolventProblem& p, const Grid& g) {
  require_on_grid(p.f1, g, "solve_resolvent");
  require_on_grid(p.f2, g, "solve_resolvent");
  if (p.f1.ncomp() != 1 || p.f2.ncomp() != 2) throw ShapeError("resolvent expects scalar f1 and 2-vector f2");
  if (p.lambda.real() < 0.0) throw DomainError("resolvent requires Re lambda >= 0");
  if (!(p.xi_bar > 0.0)) throw DomainError("xi_bar must be positive");
  if (p.lambda == 0.0 && std::abs(mean_of(p.f1)) > p.mean_tol)
    throw CompatibilityError("lambda = 0 requires a mean-free f1 (mean = " + std::to_string(std::abs(mean_of(p.f1))) +
                             ")");
}

// Full columns from the interior values of one mode.
void lift_into(const Eigen::MatrixXd& e, const Eigen::VectorXcd& x, int offset, cplx* column) {
  const int m = int(e.cols());
  Eigen::Map<Eigen::VectorXcd>(column, e.rows()) = e.cast<cplx>() * x.segment(offset, m);
}

CField2D drop_null_modes(CField2D hat, const Grid& g) {
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j)
      if (null_mode(g, i, j)) hat(0, i, j) = 0.0;
  return hat;
}

}  // namespace

MeanFreeDecomposition decompose_mean_free(const Field2D& f) {
  if (f.ncomp() != 1) throw ShapeError("decompose_mean_free expects a scalar field");
  MeanFreeDecomposition d;
  double s = 0.0;
  for (double v : f.values()) s += v;
  d.f_avg = s / double(f.size());
  d.f_m = f;
  for (auto& v : d.f_m.values()) v -= d.f_avg;
  return d;
}

double resolvent_residual(const ResolventProblem& p, const CField2D& zeta, const CField3D& v, const Grid& g,
                          const PhysicalParams& params) {
  const int nz = g.nz();
  ChsState re{real_part(zeta), real_part(v)}, im{imag_part(zeta), imag_part(v)};
  ChsState are = apply_chs(re, p.xi_bar, g, params), aim = apply_chs(im, p.xi_bar, g, params);
  double r2 = 0.0, f2n = 0.0;
  for (std::size_t n = 0; n < zeta.size(); ++n) {
    cplx a(are.zeta[n], aim.zeta[n]);
    r2 += std::norm(p.lambda * zeta[n] - a - p.f1[n]);
    f2n += std::norm(p.f1[n]);
  }
  for (std::size_t n = 0; n < v.size(); ++n) {
    const int k = int(n % nz);
    cplx a(are.v[n], aim.v[n]);
    if (k == 0 || k == nz - 1) {
      r2 += std::norm(a);
    } else {
      r2 += std::norm(p.lambda * v[n] - a - p.f2[n]);
      f2n += std::norm(p.f2[n]);
    }
  }
  return f2n > 0.0 ? std::sqrt(r2 / f2n) : std::sqrt(r2);
}

ResolventSolution solve_resolvent(const ResolventProblem& p, const Grid& g, const PhysicalParams& params) {
  check_problem(p, g);
  const int nx = g.nx(), ny = g.ny(), nz = g.nz(), m = nz - 2;
  const VerticalProfile prof = global_profile(p.xi_bar, g);
  const Eigen::MatrixXd e = lift_matrix(g);
  CField2D f1h = fft(p.f1);
  CField3D f2h = fft(p.f2);
  CField2D zh(nx, ny, 1);
  CField3D vh(nx, ny, nz, 2);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      Eigen::MatrixXcd a = -mode_chs_block(g, prof, params, p.xi_bar, 1.0, i, j);
      a.diagonal().array() += p.lambda;
      Eigen::VectorXcd rhs(1 + 2 * m);
      rhs(0) = f1h(0, i, j);
      for (int c = 0; c < 2; ++c)
        for (int q = 0; q < m; ++q) rhs(1 + c * m + q) = f2h(c, i, j, q + 1);
      Eigen::VectorXcd x = Eigen::VectorXcd::Zero(1 + 2 * m);
      if (p.lambda == 0.0 && null_mode(g, i, j)) {
        // zeta decouples; normalize it to zero
        x.tail(2 * m) = a.bottomRightCorner(2 * m, 2 * m).partialPivLu().solve(rhs.tail(2 * m));
      } else {
        x = a.partialPivLu().solve(rhs);
      }
      zh(0, i, j) = x(0);
      for (int c = 0; c < 2; ++c) lift_into(e, x, 1 + c * m, vh.column(c, i, j));
    }
  ResolventSolution s;
  s.zeta = ifft(zh);
  s.v = ifft(vh);
  if (p.lambda == 0.0) {
    // f1 content on the Nyquist corners lies outside the range and is dropped
    ResolventProblem q = p;
    q.f1 = ifft(drop_null_modes(f1h, g));
    s.residual = resolvent_residual(q, s.zeta, s.v, g, params);
  } else {
    s.residual = resolvent_residual(p, s.zeta, s.v, g, params);
  }
  if (!std::isfinite(s.residual) || s.residual > p.lin_tol)
    throw ConvergenceError("resolvent residual " + std::to_string(s.residual) + " above tolerance");
  return s;
}

SteadySolution solve_steady(const Field2D& f1, const Field3D& f2, const Grid& g, const PhysicalParams& params) {
  ResolventProblem p;
  p.f1 = to_complex(f1);
  p.f2 = to_complex(f2);
  p.xi_bar = params.xi_bar;
  ResolventSolution r = solve_resolvent(p, g, params);
  return {real_part(r.zeta), real_part(r.v), 1, r.residual};
}

SteadySolution solve_steady_decomposed(const Field2D& f1, const Field3D& f2, const Grid& g,
                                       const PhysicalParams& params, const DecomposedOptions& opt) {
  ResolventProblem prob;
  prob.f1 = to_complex(f1);
  prob.f2 = to_complex(f2);
  prob.xi_bar = params.xi_bar;
  check_problem(prob, g);

  const int nx = g.nx(), ny = g.ny(), nz = g.nz(), m = nz - 2;
  const double xb = params.xi_bar, mu = params.mu, d = kDelta;
  const LameCoefficients coeffs = LameCoefficients::hydrostatic(xb, g);
  const VerticalProfile prof = VerticalProfile::horizontal_mean(coeffs);
  const Eigen::MatrixXd e = lift_matrix(g);
  const auto& w = g.weights();

  std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>> lame_lu;
  lame_lu.reserve(std::size_t(nx) * ny);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) lame_lu.emplace_back(mode_lame_block(g, prof, params, i, j));

  // sum_k w_k xi_bar (1 - delta z_k) f2_k
  Field2D f2avg(nx, ny, 2);
  for (std::size_t col = 0; col < f2.columns(); ++col)
    for (int k = 0; k < nz; ++k) f2avg[col] += w[k] * xb * (1.0 - d * g.z(k)) * f2[col * nz + k];
  CField2D f1h = fft(f1);
  CField3D f2h = fft(f2);

  Field2D zeta(nx, ny, 1);
  Field3D v(nx, ny, nz, 2);
  SteadySolution out;
  const double top = (1.0 - d) * (1.0 - d) / (d * d);
  for (int it = 1; it <= opt.max_iter; ++it) {
    // right side of the averaged system from the current iterate
    Field3D lame = lame_expression(v, coeffs, g, params);
    Field3D vz = apply_vertical(g.dz(), v);
    Field2D gz = gradient(zeta, g);
    Field2D vbar = vertical_average(v, g);
    Field2D rhs = f2avg;
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
          double r = mu * (top * vz(c, i, j, nz - 1) - v(c, i, j, 0) / d + vbar(c, i, j));
          for (int k : {0, nz - 1}) {
            double defect = gz(c, i, j) - lame(c, i, j, k) - f2(c, i, j, k);
            r += w[k] * xb * (1.0 - d * g.z(k)) * defect;
          }
          rhs(c, i, j) += r;
        }
    CField2D gh = fft(rhs);

    CField2D zh(nx, ny, 1);
    CField3D vh(nx, ny, nz, 2);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) {
        const cplx sx = g.dx_symbol(i), sy = g.dy_symbol(j);
        cplx zt = 0.0;
        if (!null_mode(g, i, j)) {
          const double sxx = g.dxx_symbol(i), syy = g.dyy_symbol(j);
          const double pm = params.mu_prime;
          Eigen::Matrix3cd a;
          a << -mu * (sxx + syy) - pm * sxx, -pm * sx * sy, sx,
              -pm * sx * sy, -mu * (sxx + syy) - pm * syy, sy,
              sx, sy, 0.0;
          Eigen::Vector3cd b(gh(0, i, j), gh(1, i, j), f1h(0, i, j) / xb);
          zt = a.partialPivLu().solve(b)(2);
        }
        const cplx zhat = zt / (xb * (1.0 - 0.5 * d));
        zh(0, i, j) = zhat;
        Eigen::VectorXcd r(2 * m);
        const cplx s1[2] = {sx, sy};
        for (int c = 0; c < 2; ++c)
          for (int q = 0; q < m; ++q) r(c * m + q) = s1[c] * zhat - f2h(c, i, j, q + 1);
        Eigen::VectorXcd x = lame_lu[std::size_t(i) * ny + j].solve(r);
        for (int c = 0; c < 2; ++c) lift_into(e, x, c * m, vh.column(c, i, j));
      }
    Field2D zn = ifft_real(zh);
    Field3D vn = ifft_real(vh);
    double diff = norm_l2(zn - zeta) + norm_l2(vn - v, g);
    double scale = norm_l2(zn) + norm_l2(vn, g);
    zeta = std::move(zn);
    v = std::move(vn);
    out.iterations = it;
    if (diff <= opt.tol * scale || diff == 0.0) {
      out.zeta = zeta;
      out.v = v;
      prob.f1 = ifft(drop_null_modes(fft(prob.f1), g));
      out.residual = resolvent_residual(prob, to_complex(zeta), to_complex(v), g, params);
      return out;
    }
  }
  throw ConvergenceError("decomposed steady solve did not converge in " + std::to_string(opt.max_iter) +
                         " iterations");
}

Eigen::MatrixXd reduced_chs_dense(const Grid& g, const PhysicalParams& params) {
  const Eigen::MatrixXd a = assemble_chs_dense(params.xi_bar, g, params);
  const int nz = g.nz(), m = nz - 2;
  const Eigen::Index nh = Eigen::Index(g.nx()) * g.ny(), cols = 2 * nh;
  const Eigen::Index nred = nh + cols * m, nfull = nh + cols * nz;
  const Eigen::MatrixXd e = lift_matrix(g);
  Eigen::MatrixXd lift = Eigen::MatrixXd::Zero(nfull, nred);
  lift.topLeftCorner(nh, nh).setIdentity();
  for (Eigen::Index col = 0; col < cols; ++col) lift.block(nh + col * nz, nh + col * m, nz, m) = e;
  Eigen::MatrixXd al = a * lift;
  Eigen::MatrixXd red(nred, nred);
  red.topRows(nh) = al.topRows(nh);
  for (Eigen::Index col = 0; col < cols; ++col) red.middleRows(nh + col * m, m) = al.middleRows(nh + col * nz + 1, m);
  return red;
}

namespace {

// Orthonormal basis of horizontal fields without Nyquist-line content,
// optionally also without the mean.
Eigen::MatrixXd resolved_basis(const Grid& g, bool drop_mean) {
  const int nx = g.nx(), ny = g.ny();
  Eigen::VectorXd ux(nx), uy(ny);
  for (int i = 0; i < nx; ++i) ux(i) = ((i % 2) ? -1.0 : 1.0) / std::sqrt(double(nx));
  for (int j = 0; j < ny; ++j) uy(j) = ((j % 2) ? -1.0 : 1.0) / std::sqrt(double(ny));
  Eigen::MatrixXd cx = Eigen::MatrixXd::Identity(nx, nx) - ux * ux.transpose();
  Eigen::MatrixXd cy = Eigen::MatrixXd::Identity(ny, ny) - uy * uy.transpose();
  if (drop_mean) {
    // the mean is orthogonal to the Nyquist lines, so the projectors commute
    Eigen::MatrixXd c(Eigen::Index(nx) * ny, Eigen::Index(nx) * ny);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j)
        for (int ii = 0; ii < nx; ++ii)
          for (int jj = 0; jj < ny; ++jj)
            c(Eigen::Index(i) * ny + j, Eigen::Index(ii) * ny + jj) = cx(i, ii) * cy(j, jj) - 1.0 / (nx * ny);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    const Eigen::Index r = Eigen::Index(nx - 1) * (ny - 1) - 1;
    return es.eigenvectors().rightCols(r);
  }
  Eigen::MatrixXd c(Eigen::Index(nx) * ny, Eigen::Index(nx) * ny);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int ii = 0; ii < nx; ++ii)
        for (int jj = 0; jj < ny; ++jj) c(Eigen::Index(i) * ny + j, Eigen::Index(ii) * ny + jj) = cx(i, ii) * cy(j, jj);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  return es.eigenvectors().rightCols(Eigen::Index(nx - 1) * (ny - 1));
}

}  // namespace

Eigen::MatrixXd deflation_basis(const Grid& g) {
  const int m = g.nz() - 2;
  const Eigen::Index nh = Eigen::Index(g.nx()) * g.ny(), nred = nh + 2 * nh * m;
  const Eigen::MatrixXd bz = resolved_basis(g, true), bv = resolved_basis(g, false);
  const Eigen::Index rz = bz.cols(), rv = bv.cols();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(nred, rz + 2 * rv * m);
  q.topLeftCorner(nh, rz) = bz;
  for (int c = 0; c < 2; ++c)
    for (Eigen::Index h = 0; h < nh; ++h)
      for (Eigen::Index r = 0; r < rv; ++r)
        for (int k = 0; k < m; ++k) q(nh + (c * nh + h) * m + k, rz + (c * rv + r) * m + k) = bv(h, r);
  return q;
}

SpectralBound spectral_bound(const Grid& g, const PhysicalParams& params, BoundMethod method) {
  SpectralBound b;
  double best = -std::numeric_limits<double>::infinity();
  const VerticalProfile prof = global_profile(params.xi_bar, g);
  const int m = g.nz() - 2;
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      if (g.nyquist_x(i) || g.nyquist_y(j)) continue;
      Eigen::MatrixXcd a = mode_chs_block(g, prof, params, params.xi_bar, 1.0, i, j);
      if (null_mode(g, i, j)) a = Eigen::MatrixXcd(a.bottomRightCorner(2 * m, 2 * m));
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a, false);
      double mr = es.eigenvalues().real().maxCoeff();
      if (mr > best) {
        best = mr;
        b.argmax_kx = g.kx_int(i);
        b.argmax_ky = g.ky_int(j);
      }
    }
  if (method == BoundMethod::Dense) {
    if (!dense_allowed(g)) throw ResolutionError("resolution too large for a dense spectral bound");
    const Eigen::MatrixXd q = deflation_basis(g);
    const Eigen::MatrixXd proj = q.transpose() * reduced_chs_dense(g, params) * q;
    Eigen::EigenSolver<Eigen::MatrixXd> es(proj, false);
    if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolve failed");
    best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index n = 0; n < es.eigenvalues().size(); ++n) {
      b.eigenvalues.push_back(es.eigenvalues()(n));
      best = std::max(best, es.eigenvalues()(n).real());
    }
  }
  b.eta0 = -best;
  b.stable = b.eta0 > 0.0;
  return b;
}

ManufacturedResolvent manufactured_resolvent(cplx lambda, const Grid& g, const PhysicalParams& params,
                                             std::uint64_t seed) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const int nx = g.nx(), ny = g.ny(), nz = g.nz();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  ManufacturedResolvent m;
  m.zeta = Field2D(nx, ny, 1);
  m.v = Field3D(nx, ny, nz, 2);
  // profiles with V(1) = 0 and V'(0) = 0
  auto profile = [](int r, double z) {
    switch (r) {
      case 0: return 1.0 - z * z;
      case 1: return z * z - z * z * z * z;
      default: return 1.0 - z * z * z;
    }
  };
  for (int kx = -2; kx <= 2; ++kx)
    for (int ky = -2; ky <= 2; ++ky) {
      if (kx * kx + ky * ky > 4) continue;
      if (2 * std::abs(kx) >= nx || 2 * std::abs(ky) >= ny) continue;
      const double zc = nd(rng), zs = nd(rng);
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
          if (kx != 0 || ky != 0) m.zeta(0, i, j) += zc * cs + zs * sn;
          for (int c = 0; c < 2; ++c)
            for (int l = 0; l < nz; ++l)
              for (int r = 0; r < 3; ++r) m.v(c, i, j, l) += (vc[c][r] * cs + vs[c][r] * sn) * profile(r, g.z(l));
        }
    }
  ChsState a = apply_chs(ChsState{m.zeta, m.v}, params.xi_bar, g, params);
  ResolventProblem& pr = m.problem;
  pr.lambda = lambda;
  pr.xi_bar = params.xi_bar;
  pr.f1 = CField2D(nx, ny, 1);
  pr.f2 = CField3D(nx, ny, nz, 2);
  for (std::size_t n = 0; n < m.zeta.size(); ++n) pr.f1[n] = lambda * m.zeta[n] - a.zeta[n];
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j)
        for (int l = 1; l + 1 < nz; ++l) pr.f2(c, i, j, l) = lambda * m.v(c, i, j, l) - a.v(c, i, j, l);
  return m;
}

SweepReport imaginary_axis_resolvent_sweep(const Grid& g, const PhysicalParams& params, int jmax,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const int nz = g.nz();
  Field2D f1(g.nx(), g.ny(), 1);
  for (auto& v : f1.values()) v = nd(rng);
  f1 = decompose_mean_free(f1).f_m;
  Field3D f2(g.nx(), g.ny(), nz, 2);
  for (std::size_t n = 0; n < f2.size(); ++n) {
    const int k = int(n % nz);
    f2[n] = (k == 0 || k == nz - 1) ? 0.0 : nd(rng);
  }
  const double scale = norm_h1(f1, g) + norm_l2(f2, g);
  f1 *= 1.0 / scale;
  f2 *= 1.0 / scale;

  ResolventProblem p;
  p.f1 = to_complex(f1);
  p.f2 = to_complex(f2);
  p.xi_bar = params.xi_bar;
  std::vector<cplx> lambdas{0.0};
  for (int j = 0; j <= jmax; ++j) lambdas.emplace_back(0.0, std::pow(10.0, j));

  SweepReport rep;
  for (cplx lam : lambdas) {
    p.lambda = lam;
    ResolventSolution s = solve_resolvent(p, g, params);
    SweepSample smp;
    smp.lambda = lam;
    smp.v_norm = norm_l2(s.v, g);
    smp.ratio = norm_h1(s.zeta, g) + std::abs(lam) * smp.v_norm + norm_h2(s.v, g);
    smp.residual = s.residual;
    rep.samples.push_back(smp);
    rep.max_ratio = std::max(rep.max_ratio, smp.ratio);
  }
  const double ref = 3.0 * std::max(rep.samples[0].ratio, rep.samples[1].ratio);
  rep.bounded = std::all_of(rep.samples.begin(), rep.samples.end(), [&](const SweepSample& s) { return s.ratio <= ref; });

  const int nfit = std::min<int>(3, int(rep.samples.size()) - 1);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int n = int(rep.samples.size()) - nfit; n < int(rep.samples.size()); ++n) {
    double x = std::log(std::abs(rep.samples[n].lambda)), y = std::log(rep.samples[n].v_norm);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.slope = nfit >= 2 ? (nfit * sxy - sx * sy) / (nfit * sxx - sx * sx) : 0.0;
  return rep;
}

}  // namespace hlcpe
