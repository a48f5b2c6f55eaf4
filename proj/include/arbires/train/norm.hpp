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
#include <span>
#include <vector>

namespace arbires::train {

/// Per-channel z-score statistics, computed on the training split only.
struct NormStats {
  std::vector<double> mean;
  std::vector<double> std;

  std::size_t channels() const { return mean.size(); }

  /// In place over `count` contiguous values belonging to channel c.
  void normalize(std::size_t c, std::span<double> values) const;
  void denormalize(std::size_t c, std::span<double> values) const;
};

/// Accumulates per-channel moments with a numerically stable update.
class NormAccumulator {
 public:
  explicit NormAccumulator(std::size_t channels) : n_(channels, 0), mean_(channels, 0.0), m2_(channels, 0.0) {}
  void add(std::size_t c, std::span<const double> values);
  /// Throws if a channel has no data or zero spread.
  NormStats finish() const;

 private:
  std::vector<std::size_t> n_;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

}  // namespace arbires::train
