// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlcpe/transforms.hpp"

#include <string>

namespace hlcpe {

const char* to_string(Model m) {
  switch (m) {
    case Model::Gamma1: return "Gamma1";
    case Model::Gamma2: return "Gamma2";
    case Model::GeneralNoGravity: return "GeneralNoGravity";
  }
  return "unknown";
}

double PressureLaw::P(double s) const {
  double r = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) r = r * s + coeffs[k];
  return r;
}

double PressureLaw::dP(double s) const {
  double r = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;) r = r * s + double(k) * coeffs[k];
  return r;
}

double PressureLaw::internal_energy(double xi) const {
  double integral = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    double p = coeffs[k];
    if (k == 0)
      integral += p * (1.0 - 1.0 / xi);
    else if (k == 1)
      integral += p * std::log(xi);
    else
      integral += p * (std::pow(xi, double(k) - 1.0) - 1.0) / (double(k) - 1.0);
  }
  return xi * integral - P(1.0) * (xi - 1.0);
}

void PhysicalParams::validate_except_lame() const {
  if (!(mu > 0.0)) throw DomainError("mu must be > 0");
  if (!(xi_bar > 0.0)) throw DomainError("xi_bar must be > 0");
  if (!(m1 > 0.0) || !(m2 >= m1)) throw DomainError("positivity bounds must satisfy 0 < M1 <= M2");
  if (model == Model::GeneralNoGravity) {
    if (!(pressure.c1 > 0.0) || !(pressure.c2 >= pressure.c1))
      throw DomainError("pressure bounds must satisfy 0 < c1 <= c2");
    const int samples = 256;
    const double a = 0.5 * m1, b = 2.0 * m2;
    for (int n = 0; n <= samples; ++n) {
      double s = a + (b - a) * n / samples;
      double d = pressure.dP(s);
      if (d < pressure.c1 || d > pressure.c2)
        throw DomainError("P'(" + std::to_string(s) + ") = " + std::to_string(d) + " outside [c1, c2]");
    }
  }
}

void PhysicalParams::validate() const {
  validate_except_lame();
  if (!(mu + mu_prime > 0.0)) throw DomainError("mu + mu' must be > 0");
}

double zprime_of_z(double z) {
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("z outside [0,1]");
  return -std::expm1(-z) / kDelta;
}

double z_of_zprime(double zp) {
  if (!(zp >= 0.0 && zp <= 1.0)) throw DomainError("z' outside [0,1]");
  return -std::log1p(-kDelta * zp);
}

Field3D density_from_surface(const Field2D& xi, const Grid& g, const PhysicalParams& params,
                             VerticalCoordinate coord) {
  require_on_grid(xi, g, "density_from_surface");
  if (xi.ncomp() != 1) throw ShapeError("density_from_surface expects a scalar field");
  for (double v : xi.values())
    if (!(v > 0.0)) throw DomainError("surface density must be positive");
  Field3D rho(g.nx(), g.ny(), g.nz(), 1);
  std::vector<double> profile(g.nz());
  for (int k = 0; k < g.nz(); ++k) {
    double z = g.z(k);
    switch (params.model) {
      case Model::Gamma1:
        profile[k] = coord == VerticalCoordinate::Physical ? std::exp(-z) : 1.0 - kDelta * z;
        break;
      default:
        profile[k] = 1.0;
    }
  }
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j)
      for (int k = 0; k < g.nz(); ++k) {
        double s = xi(0, i, j);
        rho(0, i, j, k) = params.model == Model::Gamma2 ? s + 0.5 * g.z(k) : s * profile[k];
      }
  return rho;
}

Field3D pressure_from_density(const Field3D& rho, const PhysicalParams& params) {
  Field3D p = rho;
  for (auto& v : p.values()) {
    switch (params.model) {
      case Model::Gamma1: break;
      case Model::Gamma2: v = v * v; break;
      case Model::GeneralNoGravity: v = params.pressure.P(v); break;
    }
  }
  return p;
}

}  // namespace hlcpe
