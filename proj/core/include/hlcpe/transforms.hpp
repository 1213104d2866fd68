// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "hlcpe/grid.hpp"

namespace hlcpe {

/// delta = 1 - e^{-1}.
inline const double kDelta = 1.0 - std::exp(-1.0);

enum class Model { Gamma1, Gamma2, GeneralNoGravity };

const char* to_string(Model m);

/// Polynomial pressure law P(s) = sum_k coeffs[k] s^k with bounds c1 <= P'(s) <= c2.
struct PressureLaw {
  std::vector<double> coeffs{0.0, 1.0, 0.25};
  double c1 = 0.5;
  double c2 = 4.0;

  double P(double s) const;
  double dP(double s) const;
  // xi * int_1^xi P(s)/s^2 ds - P(1)(xi - 1)
  double internal_energy(double xi) const;
};

struct PhysicalParams {
  double mu = 1.0;
  double mu_prime = 1.0;
  Model model = Model::Gamma1;
  double xi_bar = 1.0;
  double m1 = 0.5;
  double m2 = 2.0;
  PressureLaw pressure;

  double gravity() const { return model == Model::GeneralNoGravity ? 0.0 : 1.0; }
  double sound_constant() const { return 1.0; }

  /// Throws DomainError naming the violated condition.
  void validate() const;
  /// Same checks without the Lame admissibility condition.
  void validate_except_lame() const;
};

enum class VerticalCoordinate { Physical, Transformed };

/// z' = (1 - e^{-z}) / delta.
double zprime_of_z(double z);
/// z = log(1 / (1 - delta z')).
double z_of_zprime(double zp);

/// Density from surface density at the grid's vertical nodes. For Gamma1 the
/// nodes are read as physical z or as the transformed z'.
Field3D density_from_surface(const Field2D& xi, const Grid& g, const PhysicalParams& params,
                             VerticalCoordinate coord = VerticalCoordinate::Physical);

Field3D pressure_from_density(const Field3D& rho, const PhysicalParams& params);

/// e(xi) = xi log xi + 1 - xi.
inline double entropy_density(double xi) { return xi * std::log(xi) + 1.0 - xi; }

}  // namespace hlcpe
