// Copyright 2026 The hlcpe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hlcpe/flowmap.hpp"
#include "hlcpe/grid.hpp"
#include "hlcpe/krylov.hpp"
#include "hlcpe/transforms.hpp"

namespace hlcpe {

enum class Mode { LocalGamma1, LocalGamma2, GlobalGamma1, GeneralNoGravity };

const char* to_string(Mode m);
Mode mode_from_string(const std::string& s);  // throws DomainError
Model model_of(Mode m);
inline bool is_local(Mode m) { return m != Mode::GlobalGamma1; }

/// State in hydrostatic Lagrangian coordinates. zeta is the surface density
/// (local modes) or its deviation from xi_bar (global mode). xi0 is the
/// baseline the linear part is frozen at: the initial surface density for
/// local modes, xi_bar everywhere for the global mode.
struct LagrangianState {
  Mode mode = Mode::GlobalGamma1;
  Field2D zeta;
  Field3D v;
  FlowMap fm;
  Field2D xi0;
  Field3D dtv;  // lagged time derivative of V
  double t = 0.0;
  int steps = 0;
};

/// Surface density xi at the particles.
Field2D surface_density(const LagrangianState& s, const PhysicalParams& p);

enum class F2Mutation { None, FlipAdvectionSign, FlipPressureSign, FlipVerticalAdvectionSign };

struct NonlinearOptions {
  bool dealias = true;
  F2Mutation mutation = F2Mutation::None;
};

/// F2 split by origin. Each term carries a factor (Z - I), (zeta - baseline),
/// dtV or V itself.
struct F2Terms {
  Field3D viscous_metric;  // mu part of the transformed Laplacian
  Field3D lame_metric;     // mu' part of the transformed grad div
  Field3D time_lag;
  Field3D advection;       // horizontal and vertical
  Field3D pressure;
  Field3D total() const;
};

Field2D nonlinearity_F1(const LagrangianState& s, const Grid& g, const PhysicalParams& p,
                        const NonlinearOptions& opt = {});
F2Terms nonlinearity_F2_terms(const LagrangianState& s, const Field3D& dtv, const Grid& g, const PhysicalParams& p,
                              const NonlinearOptions& opt = {});
Field3D nonlinearity_F2(const LagrangianState& s, const Field3D& dtv, const Grid& g, const PhysicalParams& p,
                        const NonlinearOptions& opt = {});

/// Physical vertical velocity at the particles. Throws DomainError when the
/// density is not positive.
Field3D reconstruct_w(const LagrangianState& s, const Grid& g, const PhysicalParams& p);

struct StepOptions {
  double dt = 1e-3;
  FlowOptions flow;
  GmresOptions gmres;
  NonlinearOptions nonlinear;
  double blowup = 1e6;
  // positivity window for local modes; the global mode uses xi >= xi_bar/2
  double m1_star = 0.25;
  double m2_star = 4.0;
};

/// First-order IMEX: linear block implicit, F1 and F2 explicit, flow map
/// advanced by the trapezoidal rule in the new and old averaged velocity.
class ImexStepper {
 public:
  ImexStepper(const Grid& g, const PhysicalParams& p, const LagrangianState& initial, const StepOptions& opt);
  ~ImexStepper();
  ImexStepper(ImexStepper&&) noexcept;
  ImexStepper& operator=(ImexStepper&&) noexcept;

  /// Throws TerminalError when the new state breaks a hypothesis.
  LagrangianState step(const LagrangianState& s);
  int last_krylov_iterations() const;
  const StepOptions& options() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Raises TerminalError if s is non-finite, outside the positivity window, or
/// its flow map violates the invertibility hypothesis.
void check_state(const LagrangianState& s, const PhysicalParams& p, const StepOptions& opt);

struct EulerianFields {
  Field2D xi;
  Field3D v;
  Field3D w;
  Field3D rho;
};

EulerianFields pull_back(const LagrangianState& s, const Grid& g, const PhysicalParams& p,
                         const FlowOptions& opt = {});

/// Lagrangian state of given Eulerian surface density and velocity at t = 0.
LagrangianState make_state(Mode mode, const Field2D& xi, const Field3D& v, const Grid& g, const PhysicalParams& p);

struct InitialData {
  enum class Preset { Steady, FourierPerturbation, RandomSmooth } preset = Preset::Steady;
  double amplitude = 0.0;
  std::optional<double> velocity_amplitude;
  std::optional<double> density_amplitude;
  int kx = 1, ky = 0;
  std::uint64_t seed = 0;
};

/// Eulerian initial surface density and velocity of a preset.
void initial_fields(const InitialData& d, Mode mode, const Grid& g, const PhysicalParams& p, Field2D& xi,
                    Field3D& v);
LagrangianState initial_state(const InitialData& d, Mode mode, const Grid& g, const PhysicalParams& p);

}  // namespace hlcpe
