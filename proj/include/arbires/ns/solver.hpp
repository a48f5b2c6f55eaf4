/* Copyright 2026 The arbires Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

// Pseudo-spectral solver for 2D incompressible Navier-Stokes in vorticity
// form on the unit torus,
//
//   d_t w + u . grad w = nu Lap w + f,   u = (d_y psi, -d_x psi),  -Lap psi = w.
//
// x1 runs along columns (k_x), x2 along rows (k_y). The nonlinear term is
// computed from the 2/3-truncated vorticity and truncated again, advanced
// with Heun's method; diffusion and forcing use Crank-Nicolson.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "arbires/grid/field.hpp"

namespace arbires::ns {

struct NSConfig {
  double viscosity = 1e-4;
  double forcing_amplitude = 0.1;
  std::size_t resolution = 64;
  std::size_t record_steps = 50;
  double record_interval = 1.0;
  /// Upper bound on the internal step; the CFL limit may lower it.
  double max_dt = 1e-3;
  double cfl_safety = 0.5;
  double blowup_threshold = 1e6;
  std::uint64_t seed = 0;
};

/// Raised when |w| exceeds the blow-up threshold or turns non-finite.
class BlowUpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Validates the configuration; `allow_inviscid` admits nu = 0 for tests.
void validate(const NSConfig& cfg, bool allow_inviscid = false);

/// f(x) = A (sin(2 pi (x1 + x2)) + cos(2 pi (x1 + x2))).
grid::Field forcing_field(double amplitude, std::size_t resolution);

/// Recovers (u, v) from single-channel vorticity. A non-zero mean is
/// projected out.
grid::Field vorticity_to_velocity(const grid::Field& omega);

/// max |d_x u + d_y v| of a two-channel velocity field, with spectral
/// derivatives.
double max_spectral_divergence(const grid::Field& velocity);

/// Domain averages (1/2)|u|^2 and (1/2) w^2.
double kinetic_energy(const grid::Field& omega);
double enstrophy(const grid::Field& omega);

class VorticitySolver {
 public:
  /// `allow_inviscid` admits nu = 0 for conservation tests.
  explicit VorticitySolver(NSConfig cfg, bool with_forcing = true, bool allow_inviscid = false);

  const NSConfig& config() const { return cfg_; }

  /// One Heun / Crank-Nicolson step of size dt.
  grid::Spectrum step(const grid::Spectrum& omega, double dt) const;

  /// Largest stable step for the current state: min(max_dt, safety * dx / max|u|).
  double stable_dt(const grid::Spectrum& omega) const;

  /// Advances by exactly `duration` using equal sub-steps no larger than
  /// stable_dt. Throws BlowUpError.
  grid::Spectrum advance(const grid::Spectrum& omega, double duration) const;

  /// Records cfg.record_steps snapshots at t = interval, 2 interval, ...
  std::vector<grid::Field> run(const grid::Field& omega0) const;

 private:
  // out = masked FFT of u . grad w
  void nonlinear(const grid::cplx* omega, grid::cplx* out) const;
  void check_blowup(const grid::Spectrum& omega) const;

  NSConfig cfg_;
  std::size_t n_;
  grid::Spectrum forcing_;
  std::vector<double> k2_;       // 4 pi^2 |k|^2 per half-spectrum bin
  std::vector<double> dx_, dy_;  // 2 pi k_x, 2 pi k_y with Nyquist zeroed
  std::vector<double> uf_, vf_;  // velocity multipliers dy / k2 and -dx / k2
  std::vector<double> keep_;     // 2/3 mask
};

/// Convenience wrapper for a single step.
grid::Spectrum step(const grid::Spectrum& omega, const NSConfig& cfg, double dt);

}  // namespace arbires::ns
