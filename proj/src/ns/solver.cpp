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

#include "arbires/ns/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>

#include "arbires/grid/fft.hpp"

namespace arbires::ns {

namespace {

using grid::cplx;
using grid::Field;
using grid::Spectrum;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
const cplx kI{0.0, 1.0};

// 2 pi k with the Nyquist bin zeroed, as odd derivatives require.
double deriv(long k, std::size_t index, std::size_t n) {
  if (n % 2 == 0 && index == n / 2) return 0.0;
  return kTwoPi * static_cast<double>(k);
}

struct Wavenumbers {
  std::vector<double> k2, dx, dy;
};

Wavenumbers wavenumbers(std::size_t n) {
  Wavenumbers w;
  const std::size_t wh = n / 2 + 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < wh; ++j) {
      const double ky = static_cast<double>(Spectrum::signed_frequency(i, n)), kx = static_cast<double>(j);
      w.k2.push_back(kTwoPi * kTwoPi * (kx * kx + ky * ky));
      w.dx.push_back(deriv(static_cast<long>(j), j, n));
      w.dy.push_back(deriv(Spectrum::signed_frequency(i, n), i, n));
    }
  return w;
}

// Velocity spectra (u_hat, v_hat) of a vorticity spectrum.
void velocity_spectra(const double* k2, const double* dx, const double* dy, const cplx* omega, std::size_t bins,
                      cplx* u, cplx* v) {
  for (std::size_t b = 0; b < bins; ++b) {
    const cplx psi = k2[b] > 0.0 ? omega[b] / k2[b] : cplx{};
    u[b] = kI * dy[b] * psi;
    v[b] = -kI * dx[b] * psi;
  }
}

}  // namespace

void validate(const NSConfig& cfg, bool allow_inviscid) {
  if (!(cfg.viscosity > 0.0 || (allow_inviscid && cfg.viscosity == 0.0))) {
    throw std::invalid_argument("viscosity must be > 0");
  }
  const std::size_t r = cfg.resolution;
  if (r < 16 || (r & (r - 1)) != 0) throw std::invalid_argument("resolution must be a power of two >= 16");
  if (cfg.record_steps < 1) throw std::invalid_argument("record_steps must be >= 1");
  if (!(cfg.record_interval > 0.0 && cfg.max_dt > 0.0 && cfg.cfl_safety > 0.0)) {
    throw std::invalid_argument("time parameters must be positive");
  }
}

Field forcing_field(double amplitude, std::size_t n) {
  Field f(1, n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      // Cell centres: x1 + x2 = (j + i + 1) / n.
      const double s = kTwoPi * (static_cast<double>(j) + static_cast<double>(i) + 1.0) / static_cast<double>(n);
      f.at(0, i, j) = amplitude * (std::sin(s) + std::cos(s));
    }
  return f;
}

Field vorticity_to_velocity(const Field& omega) {
  if (omega.channels() != 1) {
    throw grid::GridError("vorticity_to_velocity: expected 1 channel, got " + std::to_string(omega.channels()));
  }
  const std::size_t h = omega.height(), wd = omega.width();
  if (h != wd) throw grid::GridError("vorticity_to_velocity: square grid required");
  Spectrum s = grid::fft2(omega);
  if (std::abs(s.at(0, 0, 0)) > 1e-12 * static_cast<double>(h * wd)) {
    std::cerr << "warning: vorticity has non-zero mean; projecting it out\n";
  }
  s.at(0, 0, 0) = 0.0;
  const Wavenumbers w = wavenumbers(h);
  Spectrum uv(2, h, wd);
  velocity_spectra(w.k2.data(), w.dx.data(), w.dy.data(), s.coeffs().data(), s.plane(), uv.coeffs().data(), uv.coeffs().data() + s.plane());
  return grid::ifft2(uv, h, wd);
}

double max_spectral_divergence(const Field& velocity) {
  if (velocity.channels() != 2) throw grid::GridError("divergence needs a two-channel velocity field");
  const std::size_t n = velocity.height();
  const Spectrum s = grid::fft2(velocity);
  const Wavenumbers w = wavenumbers(n);
  Spectrum div(1, n, velocity.width());
  for (std::size_t b = 0; b < s.plane(); ++b) {
    div.coeffs()[b] = kI * w.dx[b] * s.coeffs()[b] + kI * w.dy[b] * s.coeffs()[s.plane() + b];
  }
  const Field d = grid::ifft2(div, n, velocity.width());
  double m = 0.0;
  for (double v : d.data()) m = std::max(m, std::abs(v));
  return m;
}

double kinetic_energy(const Field& omega) {
  const Field uv = vorticity_to_velocity(omega);
  double e = 0.0;
  for (double v : uv.data()) e += v * v;
  return 0.5 * e / static_cast<double>(omega.plane());
}

double enstrophy(const Field& omega) {
  double z = 0.0;
  for (double v : omega.data()) z += v * v;
  return 0.5 * z / static_cast<double>(omega.plane());
}

VorticitySolver::VorticitySolver(NSConfig cfg, bool with_forcing, bool allow_inviscid) : cfg_(cfg), n_(cfg.resolution) {
  validate(cfg_, allow_inviscid);
  forcing_ = grid::fft2(forcing_field(with_forcing ? cfg_.forcing_amplitude : 0.0, n_));
  Wavenumbers w = wavenumbers(n_);
  k2_ = std::move(w.k2);
  dx_ = std::move(w.dx);
  dy_ = std::move(w.dy);
  for (std::size_t b = 0; b < k2_.size(); ++b) {
    uf_.push_back(k2_[b] > 0.0 ? dy_[b] / k2_[b] : 0.0);
    vf_.push_back(k2_[b] > 0.0 ? -dx_[b] / k2_[b] : 0.0);
  }
  const long kmax = static_cast<long>((n_ - 1) / 3);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_ / 2 + 1; ++j) {
      const long ky = Spectrum::signed_frequency(i, n_);
      keep_.push_back(std::abs(ky) <= kmax && static_cast<long>(j) <= kmax ? 1.0 : 0.0);
    }
}

void VorticitySolver::nonlinear(const cplx* omega, cplx* out) const {
  const std::size_t bins = k2_.size(), plane = n_ * n_;
  thread_local std::vector<cplx> spec;
  thread_local std::vector<double> phys;
  spec.resize(4 * bins);
  phys.resize(4 * plane);
  for (std::size_t b = 0; b < bins; ++b) {
    const cplx w = keep_[b] * omega[b];
    const cplx iw{-w.imag(), w.real()};
    spec[b] = uf_[b] * iw;
    spec[bins + b] = vf_[b] * iw;
    spec[2 * bins + b] = dx_[b] * iw;
    spec[3 * bins + b] = dy_[b] * iw;
  }
  const std::size_t dims[2] = {n_, n_};
  grid::fft::irfft_consume(dims, 4, spec.data(), phys.data());
  double* prod = phys.data();
  for (std::size_t p = 0; p < plane; ++p)
    prod[p] = phys[p] * phys[2 * plane + p] + phys[plane + p] * phys[3 * plane + p];
  grid::fft::rfft(dims, 1, prod, out);
  for (std::size_t b = 0; b < bins; ++b) out[b] *= keep_[b];
  out[0] = 0.0;
}

Spectrum VorticitySolver::step(const Spectrum& omega, double dt) const {
  const std::size_t bins = k2_.size();
  const double nu = cfg_.viscosity;
  thread_local std::vector<cplx> n1, n2;
  n1.resize(bins);
  n2.resize(bins);
  const cplx* w = omega.coeffs().data();
  const cplx* f = forcing_.coeffs().data();
  nonlinear(w, n1.data());
  Spectrum out(1, n_, n_);
  cplx* o = out.coeffs().data();
  for (std::size_t b = 0; b < bins; ++b) {
    const double a = 0.5 * dt * nu * k2_[b];
    o[b] = (w[b] * (1.0 - a) + dt * (f[b] - n1[b])) / (1.0 + a);
  }
  nonlinear(o, n2.data());
  for (std::size_t b = 0; b < bins; ++b) {
    const double a = 0.5 * dt * nu * k2_[b];
    o[b] = (w[b] * (1.0 - a) + dt * (f[b] - 0.5 * (n1[b] + n2[b]))) / (1.0 + a);
  }
  return out;
}

double VorticitySolver::stable_dt(const Spectrum& omega) const {
  const std::size_t bins = omega.plane();
  std::vector<cplx> uv(2 * bins);
  velocity_spectra(k2_.data(), dx_.data(), dy_.data(), omega.coeffs().data(), bins, uv.data(), uv.data() + bins);
  const std::size_t dims[2] = {n_, n_};
  std::vector<double> phys(2 * n_ * n_);
  grid::fft::irfft(dims, 2, uv.data(), phys.data());
  double umax = 0.0;
  for (std::size_t p = 0; p < n_ * n_; ++p)
    umax = std::max(umax, std::hypot(phys[p], phys[n_ * n_ + p]));
  const double dx = 1.0 / static_cast<double>(n_);
  if (!std::isfinite(umax)) throw BlowUpError("velocity became non-finite");
  return umax > 0.0 ? std::min(cfg_.max_dt, cfg_.cfl_safety * dx / umax) : cfg_.max_dt;
}

void VorticitySolver::check_blowup(const Spectrum& omega) const {
  const Field w = grid::ifft2(omega, n_, n_);
  double m = 0.0;
  for (double v : w.data()) {
    if (!std::isfinite(v)) throw BlowUpError("vorticity became non-finite");
    m = std::max(m, std::abs(v));
  }
  if (m > cfg_.blowup_threshold) {
    throw BlowUpError("max |vorticity| " + std::to_string(m) + " exceeds " + std::to_string(cfg_.blowup_threshold));
  }
}

Spectrum VorticitySolver::advance(const Spectrum& omega, double duration) const {
  const double dt = stable_dt(omega);
  const auto steps = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
  const double h = duration / static_cast<double>(std::max<std::size_t>(steps, 1));
  Spectrum w = omega;
  for (std::size_t s = 0; s < steps; ++s) {
    w = step(w, h);
    if ((s + 1) % 256 == 0) check_blowup(w);
  }
  check_blowup(w);
  return w;
}

std::vector<Field> VorticitySolver::run(const Field& omega0) const {
  if (omega0.channels() != 1 || omega0.height() != n_ || omega0.width() != n_) {
    throw grid::GridError("initial vorticity must be [1, " + std::to_string(n_) + ", " + std::to_string(n_) + "]");
  }
  std::vector<Field> frames;
  frames.reserve(cfg_.record_steps);
  Spectrum w = grid::fft2(omega0);
  for (std::size_t r = 0; r < cfg_.record_steps; ++r) {
    w = advance(w, cfg_.record_interval);
    frames.push_back(grid::ifft2(w, n_, n_));
  }
  return frames;
}

Spectrum step(const Spectrum& omega, const NSConfig& cfg, double dt) {
  return VorticitySolver(cfg, true, true).step(omega, dt);
}

}  // namespace arbires::ns
