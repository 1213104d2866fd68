// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "hlcpe/evolve.hpp"
#include "hlcpe/grid.hpp"
#include "hlcpe/transforms.hpp"

namespace hlcpe {

/// Quadrature integral of a density over the unit cell times (0,1).
double total_mass(const Field3D& rho, const Grid& g);

/// Mass of a Lagrangian state: integral of rho over the Eulerian domain,
/// evaluated at the particles with weight det grad X. For Gamma1 the grid
/// coordinate is the transformed z' and the mass is delta * int xi.
double lagrangian_mass(const LagrangianState& s, const Grid& g, const PhysicalParams& p);

struct EnergyValue {
  double energy = 0.0;       // E (or the general-pressure variant)
  double dissipation = 0.0;  // instantaneous D
};

/// Eulerian energy and dissipation. Gamma1 reads the grid coordinate as z';
/// Gamma2 reports the kinetic part only. Throws DomainError for xi <= 0.
EnergyValue energy(const Field2D& xi, const Field3D& v, const Grid& g, const PhysicalParams& p);

/// Same functional evaluated on a Lagrangian state.
EnergyValue lagrangian_energy(const LagrangianState& s, const Grid& g, const PhysicalParams& p);

/// Internal energy density of the model (0 for Gamma2).
double internal_energy_density(double xi, const PhysicalParams& p);

struct EnergyReport {
  double t = 0.0;
  double energy = 0.0;
  double dissipation_integral = 0.0;
  double residual = 0.0;  // E(t) + int D - E(0)
  double mass = 0.0;
};

struct DecayFit {
  double eta = 0.0;
  double r2 = 0.0;
  int samples = 0;
};

/// Least-squares slope of log y against t over t >= t_skip; eta = -slope.
/// Throws DomainError for nonpositive values or fewer than 10 samples.
DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y, double t_skip);

struct PositivityReport {
  double min = 0.0;
  double max = 0.0;
  bool ok = false;
};

PositivityReport positivity_report(const Field2D& xi, double lower, double upper);
/// Bounds of the mode: xi >= xi_bar/2 (global) or [m1_star, m2_star].
PositivityReport positivity_report(const Field2D& xi, Mode mode, const PhysicalParams& p, double m1_star,
                                   double m2_star);

/// One row of the diagnostics CSV.
struct DiagnosticsRow {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double dissipation_integral = 0.0;
  double zeta_m_norm = 0.0;  // H1 norm of the mean-free part of zeta
  double v_norm = 0.0;       // L2 norm of V
  double min_xi = 0.0;
  double max_xi = 0.0;
  double min_det = 0.0;
  double energy_residual = 0.0;
};

const std::vector<std::string>& diagnostics_columns();

/// Accumulates rows; the dissipation integral uses the trapezoidal rule over
/// every recorded step.
class DiagnosticsRecorder {
 public:
  DiagnosticsRecorder(const Grid& g, const PhysicalParams& p);
  DiagnosticsRow observe(const LagrangianState& s);  // updates the integral
  const DiagnosticsRow& last() const { return last_; }
  double initial_energy() const { return e0_; }

 private:
  const Grid* g_;
  PhysicalParams p_;
  bool started_ = false;
  double e0_ = 0.0, t_prev_ = 0.0, d_prev_ = 0.0, integral_ = 0.0;
  DiagnosticsRow last_;
};

std::string diagnostics_csv(const std::vector<DiagnosticsRow>& rows);
void write_diagnostics_csv(const std::vector<DiagnosticsRow>& rows, const std::string& path);

}  // namespace hlcpe
