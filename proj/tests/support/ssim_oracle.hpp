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
#include <vector>

namespace arbires::testing {

// Direct 2D evaluation with the window clipped to the plane and renormalised.
inline double ssim_oracle(const std::vector<double>& x, const std::vector<double>& y, int h, int w, double range) {
  const double c1 = std::pow(0.01 * range, 2), c2 = std::pow(0.03 * range, 2);
  double total = 0.0;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      double ws = 0, mx = 0, my = 0, xx = 0, yy = 0, xy = 0;
      for (int di = -5; di <= 5; ++di)
        for (int dj = -5; dj <= 5; ++dj) {
          const int a = i + di, b = j + dj;
          if (a < 0 || a >= h || b < 0 || b >= w) continue;
          const double k = std::exp(-(di * di + dj * dj) / (2 * 1.5 * 1.5));
          const double p = x[a * w + b], q = y[a * w + b];
          ws += k;
          mx += k * p;
          my += k * q;
          xx += k * p * p;
          yy += k * q * q;
          xy += k * p * q;
        }
      mx /= ws, my /= ws, xx /= ws, yy /= ws, xy /= ws;
      const double vx = xx - mx * mx, vy = yy - my * my, cxy = xy - mx * my;
      total += ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
  return total / (h * w);
}

}  // namespace arbires::testing
