// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlcpe/flowmap.hpp"

#include <cmath>
#include <numbers>

#include "hlcpe/spectral.hpp"

namespace hlcpe {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Trigonometric interpolant of a stack of real nx*ny slices. Nyquist terms
// use cos so that the interpolant stays real.
class TrigInterpolant {
 public:
  TrigInterpolant(const Grid& g, std::size_t nslices) : g_(g), ns_(nslices), hat_(nslices * g.horizontal_nodes()) {}

  static TrigInterpolant of(const Field2D& f, const Grid& g) {
    TrigInterpolant t(g, f.ncomp());
    CField2D h = fft(f);
    const double scale = 1.0 / double(g.horizontal_nodes());
    for (int c = 0; c < f.ncomp(); ++c)
      for (std::size_t n = 0; n < g.horizontal_nodes(); ++n) t.hat_[c * g.horizontal_nodes() + n] = h.comp(c)[n] * scale;
    return t;
  }

  static TrigInterpolant of(const Field3D& f, const Grid& g) {
    TrigInterpolant t(g, std::size_t(f.ncomp()) * f.nz());
    CField3D h = fft(f);
    const double scale = 1.0 / double(g.horizontal_nodes());
    for (int c = 0; c < f.ncomp(); ++c)
      for (int k = 0; k < f.nz(); ++k) {
        cplx* dst = &t.hat_[(std::size_t(c) * f.nz() + k) * g.horizontal_nodes()];
        for (int i = 0; i < g.nx(); ++i)
          for (int j = 0; j < g.ny(); ++j) dst[std::size_t(i) * g.ny() + j] = h(c, i, j, k) * scale;
      }
    return t;
  }

  // out[s] = interpolant of slice s at (px, py)
  void eval(double px, double py, double* out) const {
    const int nx = g_.nx(), ny = g_.ny();
    ex_.resize(nx);
    ey_.resize(ny);
    for (int i = 0; i < nx; ++i) {
      int k = g_.kx_int(i);
      ex_[i] = g_.nyquist_x(i) ? cplx(std::cos(kTwoPi * k * px)) : std::polar(1.0, kTwoPi * k * px);
    }
    for (int j = 0; j < ny; ++j) {
      int k = g_.ky_int(j);
      ey_[j] = g_.nyquist_y(j) ? cplx(std::cos(kTwoPi * k * py)) : std::polar(1.0, kTwoPi * k * py);
    }
    for (std::size_t s = 0; s < ns_; ++s) {
      const cplx* h = &hat_[s * g_.horizontal_nodes()];
      cplx acc = 0.0;
      for (int i = 0; i < nx; ++i) {
        cplx row = 0.0;
        for (int j = 0; j < ny; ++j) row += h[std::size_t(i) * ny + j] * ey_[j];
        acc += ex_[i] * row;
      }
      out[s] = acc.real();
    }
  }

  std::size_t slices() const { return ns_; }

 private:
  const Grid& g_;
  std::size_t ns_;
  std::vector<cplx> hat_;
  mutable std::vector<cplx> ex_, ey_;
};

struct FlowRhs {
  Field2D dd;  // d displacement / dt
  Field2D dg;  // d grad_dev / dt
};

// J (grad v) at positions times (I + G)
Field2D mat_times_jac(const Field2D& j, const Field2D& gdev) {
  Field2D out(j.nx(), j.ny(), 4);
  for (int i = 0; i < j.nx(); ++i)
    for (int jj = 0; jj < j.ny(); ++jj)
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s) {
          double acc = 0.0;
          for (int m = 0; m < 2; ++m)
            acc += j(mat_index(r, m), i, jj) * ((m == s ? 1.0 : 0.0) + gdev(mat_index(m, s), i, jj));
          out(mat_index(r, s), i, jj) = acc;
        }
  return out;
}

FlowMap finish(FlowMap fm, const FlowOptions& opt) {
  InverseJacobian inv = inverse_jacobian(fm.jacobian());
  fm.z = std::move(inv.z);
  fm.det = std::move(inv.det);
  double mind = 1e300;
  for (double d : fm.det.values()) mind = std::min(mind, d);
  if (mind < opt.det_floor)
    throw SingularJacobianError("det grad X = " + std::to_string(mind) + " fell below the floor " +
                                std::to_string(opt.det_floor));
  return fm;
}

}  // namespace

FlowMap FlowMap::identity(const Grid& g) {
  FlowMap fm;
  fm.displacement = Field2D(g.nx(), g.ny(), 2);
  fm.grad_dev = Field2D(g.nx(), g.ny(), 4);
  fm.z = Field2D(g.nx(), g.ny(), 4);
  fm.det = Field2D(g.nx(), g.ny(), 1, 1.0);
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) fm.z(0, i, j) = fm.z(3, i, j) = 1.0;
  return fm;
}

Field2D FlowMap::jacobian() const {
  Field2D j = grad_dev;
  for (int i = 0; i < j.nx(); ++i)
    for (int jj = 0; jj < j.ny(); ++jj) {
      j(0, i, jj) += 1.0;
      j(3, i, jj) += 1.0;
    }
  return j;
}

Field2D FlowMap::positions(const Grid& g) const {
  Field2D p = shifted_nodes(displacement, g);
  for (auto& v : p.values()) v -= std::floor(v);
  return p;
}

Field2D shifted_nodes(const Field2D& displacement, const Grid& g) {
  require_on_grid(displacement, g, "shifted_nodes");
  Field2D p = displacement;
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      p(0, i, j) += g.x(i);
      p(1, i, j) += g.y(j);
    }
  return p;
}

InverseJacobian inverse_jacobian(const Field2D& grad) {
  if (grad.ncomp() != 4) throw ShapeError("inverse_jacobian expects a 2x2 matrix field");
  InverseJacobian out{Field2D(grad.nx(), grad.ny(), 4), Field2D(grad.nx(), grad.ny(), 1)};
  for (int i = 0; i < grad.nx(); ++i)
    for (int j = 0; j < grad.ny(); ++j) {
      double a = grad(0, i, j), b = grad(1, i, j), c = grad(2, i, j), d = grad(3, i, j);
      double det = a * d - b * c;
      if (!(std::abs(det) > 0.0) || !std::isfinite(det))
        throw SingularJacobianError("singular Jacobian at node (" + std::to_string(i) + "," + std::to_string(j) + ")");
      // Z = Cof(grad)^T / det
      out.z(0, i, j) = d / det;
      out.z(1, i, j) = -b / det;
      out.z(2, i, j) = -c / det;
      out.z(3, i, j) = a / det;
      out.det(0, i, j) = det;
    }
  return out;
}

Field2D matrix_norm(const Field2D& m) {
  if (m.ncomp() != 4) throw ShapeError("matrix_norm expects a 2x2 matrix field");
  Field2D out(m.nx(), m.ny(), 1);
  for (int i = 0; i < m.nx(); ++i)
    for (int j = 0; j < m.ny(); ++j) {
      double a = m(0, i, j), b = m(1, i, j), c = m(2, i, j), d = m(3, i, j);
      double t = a * a + b * b + c * c + d * d;
      double det = a * d - b * c;
      double disc = std::max(0.0, t * t - 4.0 * det * det);
      out(0, i, j) = std::sqrt(0.5 * (t + std::sqrt(disc)));
    }
  return out;
}

InvertibilityReport check_invertibility(const FlowMap& fm, const FlowOptions& opt) {
  InvertibilityReport r;
  Field2D n = matrix_norm(fm.grad_dev);
  r.supnorm_dev = max_abs(n);
  r.min_det = 1e300;
  for (double d : fm.det.values()) r.min_det = std::min(r.min_det, d);
  r.ok = std::isfinite(r.supnorm_dev) && r.supnorm_dev <= 0.5 && r.min_det >= opt.det_floor;
  return r;
}

FlowMap advance_flow(const FlowMap& fm, const Field2D& vbar, double dt, const Grid& g, const FlowOptions& opt) {
  if (!(dt > 0.0)) throw DomainError("advance_flow: dt must be positive");
  require_on_grid(vbar, g, "advance_flow");
  if (vbar.ncomp() != 2) throw ShapeError("advance_flow expects a 2-vector velocity");
  TrigInterpolant vel = TrigInterpolant::of(vbar, g);
  TrigInterpolant jac = TrigInterpolant::of(horizontal_derivatives(vbar, g).grad, g);

  auto rhs = [&](const Field2D& d, const Field2D& gd) {
    FlowRhs r{Field2D(g.nx(), g.ny(), 2), Field2D(g.nx(), g.ny(), 4)};
    Field2D jat(g.nx(), g.ny(), 4);
    double u[2], jv[4];
    for (int i = 0; i < g.nx(); ++i)
      for (int j = 0; j < g.ny(); ++j) {
        double px = g.x(i) + d(0, i, j), py = g.y(j) + d(1, i, j);
        vel.eval(px, py, u);
        jac.eval(px, py, jv);
        r.dd(0, i, j) = u[0];
        r.dd(1, i, j) = u[1];
        for (int m = 0; m < 4; ++m) jat(m, i, j) = jv[m];
      }
    r.dg = mat_times_jac(jat, gd);
    return r;
  };

  const Field2D& d0 = fm.displacement;
  const Field2D& g0 = fm.grad_dev;
  FlowRhs k1 = rhs(d0, g0);
  FlowRhs k2 = rhs(Field2D(d0).axpy(0.5 * dt, k1.dd), Field2D(g0).axpy(0.5 * dt, k1.dg));
  FlowRhs k3 = rhs(Field2D(d0).axpy(0.5 * dt, k2.dd), Field2D(g0).axpy(0.5 * dt, k2.dg));
  FlowRhs k4 = rhs(Field2D(d0).axpy(dt, k3.dd), Field2D(g0).axpy(dt, k3.dg));

  FlowMap out;
  out.displacement = d0;
  out.displacement.axpy(dt / 6.0, k1.dd).axpy(dt / 3.0, k2.dd).axpy(dt / 3.0, k3.dd).axpy(dt / 6.0, k4.dd);
  out.grad_dev = g0;
  out.grad_dev.axpy(dt / 6.0, k1.dg).axpy(dt / 3.0, k2.dg).axpy(dt / 3.0, k3.dg).axpy(dt / 6.0, k4.dg);
  out.t = fm.t + dt;
  return finish(std::move(out), opt);
}

FlowMap advance_flow_lagrangian(const FlowMap& fm, const Field2D& vbar_old, const Field2D& vbar_new, double dt,
                                const Grid& g, const FlowOptions& opt) {
  if (!(dt > 0.0)) throw DomainError("advance_flow_lagrangian: dt must be positive");
  Field2D vsum = vbar_old;
  vsum += vbar_new;
  FlowMap out;
  out.displacement = fm.displacement;
  out.displacement.axpy(0.5 * dt, vsum);
  out.grad_dev = fm.grad_dev;
  out.grad_dev.axpy(0.5 * dt, horizontal_derivatives(vsum, g).grad);
  out.t = fm.t + dt;
  return finish(std::move(out), opt);
}

Field2D invert_map(const FlowMap& fm, const Grid& g, const FlowOptions& opt) {
  Field2D packed(g.nx(), g.ny(), 6);
  for (int c = 0; c < 2; ++c) std::copy(fm.displacement.comp(c), fm.displacement.comp(c) + packed.slice_size(), packed.comp(c));
  for (int c = 0; c < 4; ++c) std::copy(fm.grad_dev.comp(c), fm.grad_dev.comp(c) + packed.slice_size(), packed.comp(2 + c));
  TrigInterpolant interp = TrigInterpolant::of(packed, g);

  Field2D y(g.nx(), g.ny(), 2);
  double v[6];
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      const double tx = g.x(i), ty = g.y(j);
      interp.eval(tx, ty, v);
      double y0 = tx - v[0], y1 = ty - v[1];
      bool done = false;
      for (int it = 0; it < opt.max_iter && !done; ++it) {
        interp.eval(y0, y1, v);
        double r0 = y0 + v[0] - tx, r1 = y1 + v[1] - ty;
        r0 -= std::round(r0);
        r1 -= std::round(r1);
        if (std::max(std::abs(r0), std::abs(r1)) <= 0.1 * opt.inv_tol) {
          done = true;
          break;
        }
        double a = 1.0 + v[2], b = v[3], c = v[4], d = 1.0 + v[5];
        double det = a * d - b * c;
        if (!(std::abs(det) > 0.0)) throw SingularJacobianError("invert_map: singular Jacobian during Newton");
        y0 -= (d * r0 - b * r1) / det;
        y1 -= (-c * r0 + a * r1) / det;
      }
      if (!done) {
        interp.eval(y0, y1, v);
        double r0 = y0 + v[0] - tx, r1 = y1 + v[1] - ty;
        r0 -= std::round(r0);
        r1 -= std::round(r1);
        if (std::max(std::abs(r0), std::abs(r1)) > opt.inv_tol)
          throw ConvergenceError("invert_map: Newton did not converge at node (" + std::to_string(i) + "," +
                                 std::to_string(j) + ")");
      }
      y(0, i, j) = y0 - std::floor(y0);
      y(1, i, j) = y1 - std::floor(y1);
    }
  return y;
}

Field2D compose(const Field2D& f, const Field2D& positions, const Grid& g) {
  require_on_grid(f, g, "compose");
  require_on_grid(positions, g, "compose");
  if (positions.ncomp() != 2) throw ShapeError("compose expects a 2-vector position field");
  TrigInterpolant t = TrigInterpolant::of(f, g);
  Field2D out(g.nx(), g.ny(), f.ncomp());
  std::vector<double> v(t.slices());
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      t.eval(positions(0, i, j), positions(1, i, j), v.data());
      for (int c = 0; c < f.ncomp(); ++c) out(c, i, j) = v[c];
    }
  return out;
}

Field3D compose(const Field3D& f, const Field2D& positions, const Grid& g) {
  require_on_grid(f, g, "compose");
  require_on_grid(positions, g, "compose");
  if (positions.ncomp() != 2) throw ShapeError("compose expects a 2-vector position field");
  TrigInterpolant t = TrigInterpolant::of(f, g);
  Field3D out(g.nx(), g.ny(), g.nz(), f.ncomp());
  std::vector<double> v(t.slices());
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      t.eval(positions(0, i, j), positions(1, i, j), v.data());
      for (int c = 0; c < f.ncomp(); ++c)
        for (int k = 0; k < g.nz(); ++k) out(c, i, j, k) = v[std::size_t(c) * g.nz() + k];
    }
  return out;
}

}  // namespace hlcpe
