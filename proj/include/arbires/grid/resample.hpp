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
#include <vector>

#include "arbires/grid/field.hpp"

namespace arbires::grid {

enum class ResampleMode { Nearest, Bilinear, Bicubic, AveragePool };

/// How samples outside the grid are obtained. Periodic wraps around the
/// torus; Replicate clamps to the nearest edge sample.
enum class Boundary { Periodic, Replicate };

/// Resampling request. Interpolation treats samples as cell centres, so a
/// k-fold nearest upsample replicates each sample into a k x k block and is
/// undone exactly by a k-fold average pool.
struct ResampleSpec {
  ResampleMode mode = ResampleMode::Bicubic;
  Boundary boundary = Boundary::Periodic;
};

/// Catmull-Rom cubic convolution parameter.
inline constexpr double kBicubicA = -0.5;

Field resample(const Field& field, const ResampleSpec& spec, std::size_t out_height, std::size_t out_width);

Field average_pool(const Field& field, std::size_t factor);

const char* mode_name(ResampleMode mode);
ResampleMode parse_mode(const std::string& name);
const char* boundary_name(Boundary b);
Boundary parse_boundary(const std::string& name);

/// Sparse 1D interpolation operator: output index o reads taps
/// index[o * taps + t] with weight weight[o * taps + t]. Interpolating a 2D
/// plane applies one table along rows and another along columns; the
/// transpose of the same tables gives the adjoint used for backprop.
struct InterpTable {
  std::size_t in_size = 0;
  std::size_t out_size = 0;
  std::size_t taps = 0;
  std::vector<std::size_t> index;
  std::vector<double> weight;
};

InterpTable make_interp_table(ResampleMode mode, Boundary boundary, std::size_t in_size, std::size_t out_size);

/// Cubic convolution taps as sampled at arbitrary positions. Used to read a
/// bicubic interpolant at a coarser grid (decimation), which the public
/// resample() refuses by contract.
InterpTable make_bicubic_sampling_table(Boundary boundary, std::size_t in_size, std::size_t out_size);

/// Applies (rows, cols) tables to `planes` contiguous [in_h, in_w] planes.
void apply_separable(const InterpTable& rows, const InterpTable& cols, std::size_t planes, const double* in,
                     double* out);
/// Adjoint of apply_separable: accumulates into grad_in.
void apply_separable_adjoint(const InterpTable& rows, const InterpTable& cols, std::size_t planes,
                             const double* grad_out, double* grad_in);

/// Block mean over factor x factor cells of `planes` contiguous planes.
void average_pool_planes(std::size_t planes, std::size_t height, std::size_t width, std::size_t factor,
                         const double* in, double* out);

}  // namespace arbires::grid
