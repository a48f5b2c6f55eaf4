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

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "arbires/ad/tensor.hpp"
#include "arbires/io/manifest.hpp"

namespace arbires::train {

struct ViewOptions {
  /// Input window followed by output window (ns-sim data); otherwise each
  /// frame is an independent sample.
  bool temporal = false;
  /// Take every k-th window start.
  std::size_t window_stride = 1;
  /// Keep at most this many samples (0 = all).
  std::size_t limit = 0;
};

/// One split of a stored dataset held in memory, z-scored with the
/// manifest statistics, at the requested resolutions.
class DatasetView {
 public:
  DatasetView(const std::filesystem::path& root, const io::DatasetManifest& manifest, const std::string& split,
              std::vector<std::size_t> resolutions, ViewOptions options = {});

  std::size_t size() const { return samples_.size(); }
  std::size_t channels() const { return channels_; }
  bool temporal() const { return options_.temporal; }
  std::size_t window_in() const { return window_in_; }
  std::size_t window_out() const { return window_out_; }
  const NormStats& norm() const { return norm_; }
  const std::vector<std::size_t>& resolutions() const { return resolutions_; }
  bool has_resolution(std::size_t res) const { return data_.count(res) != 0; }

  /// [B, C, H, W] or, for temporal views, [B, C, window_in, H, W].
  ad::Tensor inputs(std::span<const std::size_t> idx, std::size_t res) const;
  /// [B, C, H, W] or [B, C, window_out, H, W].
  ad::Tensor targets(std::span<const std::size_t> idx, std::size_t res) const;

  /// Per-channel max - min of the physical values at the finest loaded
  /// resolution.
  const std::vector<double>& channel_range() const { return range_; }

 private:
  ad::Tensor gather(std::span<const std::size_t> idx, std::size_t res, std::size_t offset, std::size_t frames) const;

  ViewOptions options_;
  NormStats norm_;
  std::size_t channels_ = 0;
  std::size_t frames_ = 0;
  std::size_t window_in_ = 1;
  std::size_t window_out_ = 1;
  std::vector<std::size_t> resolutions_;
  // res -> per record [C, T, res, res], normalised.
  std::map<std::size_t, std::vector<std::vector<double>>> data_;
  // (record, first frame)
  std::vector<std::pair<std::size_t, std::size_t>> samples_;
  std::vector<double> range_;
};

}  // namespace arbires::train
