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

#include "arbires/grid/sobel.hpp"

#include <string>

namespace arbires::grid {

namespace {

constexpr double kSobelX[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
constexpr double kSobelY[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};

std::size_t neighbour(std::size_t i, int d, std::size_t n, Boundary b) {
  const long k = static_cast<long>(i) + d;
  const long nn = static_cast<long>(n);
  if (b == Boundary::Periodic) return static_cast<std::size_t>((k + nn) % nn);
  return static_cast<std::size_t>(k < 0 ? 0 : (k >= nn ? nn - 1 : k));
}

}  // namespace

void sobel_planes(std::size_t planes, std::size_t height, std::size_t width, Boundary boundary, const double* in,
                  double* out) {
  if (height < 3 || width < 3) {
    throw GridError("sobel needs at least 3x3, got " + std::to_string(height) + "x" + std::to_string(width));
  }
  const std::size_t plane = height * width;
  for (std::size_t p = 0; p < planes; ++p) {
    const double* src = in + p * plane;
    double* gx = out + 2 * p * plane;
    double* gy = gx + plane;
    for (std::size_t i = 0; i < height; ++i) {
      for (std::size_t j = 0; j < width; ++j) {
        double sx = 0.0, sy = 0.0;
        for (int di = -1; di <= 1; ++di) {
          const std::size_t ii = neighbour(i, di, height, boundary);
          for (int dj = -1; dj <= 1; ++dj) {
            const double v = src[ii * width + neighbour(j, dj, width, boundary)];
            sx += kSobelX[di + 1][dj + 1] * v;
            sy += kSobelY[di + 1][dj + 1] * v;
          }
        }
        gx[i * width + j] = sx;
        gy[i * width + j] = sy;
      }
    }
  }
}

Field sobel(const Field& field, Boundary boundary) {
  Field out(2 * field.channels(), field.height(), field.width());
  sobel_planes(field.channels(), field.height(), field.width(), boundary, field.data().data(), out.data().data());
  return out;
}

}  // namespace arbires::grid
