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

#include <cmath>
#include <cstdint>

#include "arbires/grid/field.hpp"

namespace arbires::ns {

/// Mean-zero Gaussian random field on the unit torus with covariance
/// sigma^2 (-Laplacian + tau^2 I)^(-alpha). The Fourier coefficient of wave
/// vector k then has standard deviation sigma (4 pi^2 |k|^2 + tau^2)^(-alpha/2).
struct GRFConfig {
  double alpha = 2.5;
  double tau = 7.0;
  /// sigma^2 = 7^(3/2), the radial prefactor taken equal to tau.
  double sigma = std::pow(7.0, 0.75);
};

void validate(const GRFConfig& cfg);

/// Standard deviation of the Fourier-series coefficient at |k|^2.
double grf_coefficient_std(const GRFConfig& cfg, double k_squared);

/// One [1, n, n] sample. Exactly real by construction, DC forced to zero.
grid::Field sample_grf(const GRFConfig& cfg, std::size_t resolution, std::uint64_t seed);

}  // namespace arbires::ns
