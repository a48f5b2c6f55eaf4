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

#include "arbires/train/norm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace arbires::train {

void NormStats::normalize(std::size_t c, std::span<double> values) const {
  const double m = mean.at(c), s = std.at(c);
  for (double& v : values) v = (v - m) / s;
}

void NormStats::denormalize(std::size_t c, std::span<double> values) const {
  const double m = mean.at(c), s = std.at(c);
  for (double& v : values) v = v * s + m;
}

void NormAccumulator::add(std::size_t c, std::span<const double> values) {
  // Chan et al. pairwise merge of the batch into the running moments.
  if (values.empty()) return;
  double bm = 0.0;
  for (double v : values) bm += v;
  bm /= static_cast<double>(values.size());
  double bm2 = 0.0;
  for (double v : values) bm2 += (v - bm) * (v - bm);
  const double na = static_cast<double>(n_[c]), nb = static_cast<double>(values.size());
  const double delta = bm - mean_[c];
  mean_[c] += delta * nb / (na + nb);
  m2_[c] += bm2 + delta * delta * na * nb / (na + nb);
  n_[c] += values.size();
}

NormStats NormAccumulator::finish() const {
  NormStats s;
  for (std::size_t c = 0; c < n_.size(); ++c) {
    if (n_[c] == 0) throw std::runtime_error("normalization: channel " + std::to_string(c) + " has no data");
    const double sd = std::sqrt(m2_[c] / static_cast<double>(n_[c]));
    if (!(sd > 0.0)) throw std::runtime_error("normalization: channel " + std::to_string(c) + " has zero spread");
    s.mean.push_back(mean_[c]);
    s.std.push_back(sd);
  }
  return s;
}

}  // namespace arbires::train
