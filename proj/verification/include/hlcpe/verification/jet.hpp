// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace hlcpe::verification {

/// Value and gradient with respect to (y1, y2).
struct Jet {
  double v = 0.0;
  std::array<double, 2> d{0.0, 0.0};

  static Jet constant(double c) { return {c, {0.0, 0.0}}; }
};

inline Jet operator+(Jet a, const Jet& b) {
  a.v += b.v;
  a.d[0] += b.d[0];
  a.d[1] += b.d[1];
  return a;
}
inline Jet operator-(Jet a, const Jet& b) {
  a.v -= b.v;
  a.d[0] -= b.d[0];
  a.d[1] -= b.d[1];
  return a;
}
inline Jet operator-(const Jet& a) { return {-a.v, {-a.d[0], -a.d[1]}}; }
inline Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v, {a.d[0] * b.v + a.v * b.d[0], a.d[1] * b.v + a.v * b.d[1]}};
}
inline Jet operator*(double s, const Jet& a) { return {s * a.v, {s * a.d[0], s * a.d[1]}}; }
inline Jet operator/(const Jet& a, const Jet& b) {
  const double q = a.v / b.v;
  return {q, {(a.d[0] - q * b.d[0]) / b.v, (a.d[1] - q * b.d[1]) / b.v}};
}

/// Value, gradient and Hessian of an analytic field at one point.
struct Jet2 {
  double v = 0.0;
  std::array<double, 2> d{0.0, 0.0};
  std::array<std::array<double, 2>, 2> h{};

  Jet jet() const { return {v, d}; }
  // d/dy_j as a first-order jet
  Jet partial(int j) const { return {d[j], {h[j][0], h[j][1]}}; }

  Jet2& axpy(double s, const Jet2& o) {
    v += s * o.v;
    for (int a = 0; a < 2; ++a) {
      d[a] += s * o.d[a];
      for (int b = 0; b < 2; ++b) h[a][b] += s * o.h[a][b];
    }
    return *this;
  }
};

/// Real trigonometric polynomial sum a cos(2 pi k.y) + b sin(2 pi k.y).
struct TrigSeries {
  struct Term {
    int kx, ky;
    double a, b;
  };
  std::vector<Term> terms;

  Jet2 eval(double y1, double y2) const {
    constexpr double two_pi = 6.283185307179586476925286766559;
    Jet2 r;
    for (const Term& t : terms) {
      const double k[2] = {two_pi * t.kx, two_pi * t.ky};
      const double th = k[0] * y1 + k[1] * y2;
      const double c = std::cos(th), s = std::sin(th);
      const double f = t.a * c + t.b * s;
      const double fp = -t.a * s + t.b * c;  // d f / d th
      r.v += f;
      for (int a = 0; a < 2; ++a) {
        r.d[a] += k[a] * fp;
        for (int b = 0; b < 2; ++b) r.h[a][b] -= k[a] * k[b] * f;
      }
    }
    return r;
  }
};

/// Polynomial in z, coefficients in increasing degree.
struct Poly {
  std::vector<double> c;

  double operator()(double z) const {
    double s = 0.0;
    for (std::size_t n = c.size(); n-- > 0;) s = s * z + c[n];
    return s;
  }
  Poly derivative() const {
    Poly p;
    for (std::size_t n = 1; n < c.size(); ++n) p.c.push_back(double(n) * c[n]);
    return p;
  }
  // integral from 0 to z
  Poly antiderivative() const {
    Poly p{{0.0}};
    for (std::size_t n = 0; n < c.size(); ++n) p.c.push_back(c[n] / double(n + 1));
    return p;
  }
  Poly times_z() const {
    Poly p{{0.0}};
    p.c.insert(p.c.end(), c.begin(), c.end());
    return p;
  }
  double integral01() const { return antiderivative()(1.0); }
};

}  // namespace hlcpe::verification
