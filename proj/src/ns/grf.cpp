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

#include "arbires/ns/grf.hpp"

#include <numbers>
#include <random>

#include "arbires/grid/fft.hpp"

namespace arbires::ns {

void validate(const GRFConfig& cfg) {
  if (!(cfg.alpha > 0 && cfg.tau > 0 && cfg.sigma > 0)) throw grid::GridError("GRF parameters must be positive");
}

double grf_coefficient_std(const GRFConfig& cfg, double k_squared) {
  constexpr double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
  return cfg.sigma * std::pow(four_pi2 * k_squared + cfg.tau * cfg.tau, -cfg.alpha / 2.0);
}

grid::Field sample_grf(const GRFConfig& cfg, std::size_t resolution, std::uint64_t seed) {
  validate(cfg);
  if (resolution < 16) throw grid::GridError("GRF resolution must be >= 16, got " + std::to_string(resolution));
  const std::size_t n = resolution;
  // Coloring real white noise in Fourier space keeps the result exactly
  // real and Hermitian without bookkeeping of conjugate pairs.
  grid::Field noise(1, n, n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (double& v : noise.data()) v = normal(rng);
  grid::Spectrum spec = grid::fft2(noise);
  const double root_n = std::sqrt(static_cast<double>(n * n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < spec.half_width(); ++j) {
      const double ky = static_cast<double>(spec.ky(i)), kx = static_cast<double>(spec.kx(j));
      spec.at(0, i, j) *= root_n * grf_coefficient_std(cfg, kx * kx + ky * ky);
    }
  spec.at(0, 0, 0) = 0.0;
  return grid::ifft2(spec, n, n);
}

}  // namespace arbires::ns
