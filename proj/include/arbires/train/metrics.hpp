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

#include <cstddef>
#include <limits>
#include <span>
#include <string>

#include "arbires/ad/ops.hpp"

namespace arbires::train {

enum class LossKind { L1, L2 };

const char* loss_name(LossKind k);
LossKind parse_loss(const std::string& s);

/// Differentiable training loss; shapes must match.
ad::Var loss(LossKind kind, ad::Var pred, ad::Var target);

double mae(std::span<const double> pred, std::span<const double> target);
double mse(std::span<const double> pred, std::span<const double> target);

/// Returned by psnr() for identical inputs.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

/// 10 log10(peak^2 / mse).
double psnr_from_mse(double mse, double peak);
double psnr(std::span<const double> pred, std::span<const double> target, double peak);

struct SsimParams {
  std::size_t window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

/// Mean local SSIM of one [h, w] plane. The Gaussian window is truncated at
/// the borders and renormalised, so every pixel contributes. `range` is the
/// data range L in the stabilising constants (k L)^2.
double ssim_plane(const double* pred, const double* target, std::size_t h, std::size_t w, double range,
                  const SsimParams& params = {});
/// Average of ssim_plane over `planes` consecutive planes.
double ssim(const double* pred, const double* target, std::size_t planes, std::size_t h, std::size_t w, double range,
            const SsimParams& params = {});

}  // namespace arbires::train
