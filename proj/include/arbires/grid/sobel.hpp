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

#include "arbires/grid/field.hpp"
#include "arbires/grid/resample.hpp"

namespace arbires::grid {

/// 3x3 Sobel gradients. Output channel 2c holds the x-gradient (along
/// columns) of input channel c and 2c + 1 the y-gradient (along rows).
/// Requires H, W >= 3.
Field sobel(const Field& field, Boundary boundary = Boundary::Periodic);

/// Sobel of `planes` contiguous [h, w] planes; out holds 2 * planes planes.
void sobel_planes(std::size_t planes, std::size_t height, std::size_t width, Boundary boundary, const double* in,
                  double* out);

}  // namespace arbires::grid
