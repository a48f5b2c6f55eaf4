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

#include "arbires/train/data.hpp"

#include <algorithm>
#include <limits>

#include "arbires/io/grd1.hpp"

namespace arbires::train {

DatasetView::DatasetView(const std::filesystem::path& root, const io::DatasetManifest& manifest,
                         const std::string& split, std::vector<std::size_t> resolutions, ViewOptions options)
    : options_(options), norm_(manifest.norm), channels_(manifest.channels.size()), frames_(manifest.frames) {
  std::sort(resolutions.begin(), resolutions.end());
  resolutions.erase(std::unique(resolutions.begin(), resolutions.end()), resolutions.end());
  resolutions_ = resolutions;
  if (resolutions_.empty()) throw io::FormatError("dataset view: no resolutions requested");
  for (std::size_t r : resolutions_)
    if (!manifest.has_resolution(r))
      throw io::FormatError("dataset '" + manifest.dataset_id + "' has no " + std::to_string(r) + "x" +
                            std::to_string(r) + " level");
  if (norm_.channels() != channels_) throw io::FormatError("dataset view: normalisation does not match channels");
  if (options_.temporal) {
    window_in_ = manifest.window_in;
    window_out_ = manifest.window_out;
    if (window_in_ == 0 || window_out_ == 0 || window_in_ + window_out_ > frames_)
      throw io::FormatError("dataset '" + manifest.dataset_id + "' holds no temporal windows");
  }
  const std::vector<std::string> ids = manifest.ids(split);
  const std::size_t stride = std::max<std::size_t>(1, options_.window_stride);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (options_.temporal) {
      for (std::size_t t = 0; t + window_in_ + window_out_ <= frames_; t += stride) samples_.emplace_back(r, t);
    } else {
      for (std::size_t t = 0; t < frames_; t += stride) samples_.emplace_back(r, t);
    }
  }
  if (options_.limit > 0 && samples_.size() > options_.limit) samples_.resize(options_.limit);

  range_.assign(channels_, 0.0);
  for (std::size_t res : resolutions_) {
    auto& recs = data_[res];
    std::vector<double> lo(channels_, std::numeric_limits<double>::infinity()), hi(channels_, -lo[0]);
    for (const std::string& id : ids) {
      io::Grd1Record rec = io::read_grd1_file(io::record_path(root, id, res));
      const std::vector<std::uint64_t> expect{channels_, frames_, res, res};
      if (rec.dims != expect)
        throw io::FormatError(io::record_path(root, id, res).string() + ": unexpected record shape");
      const std::size_t per_channel = frames_ * res * res;
      for (std::size_t c = 0; c < channels_; ++c) {
        std::span<double> v(rec.data.data() + c * per_channel, per_channel);
        for (double x : v) {
          lo[c] = std::min(lo[c], x);
          hi[c] = std::max(hi[c], x);
        }
        norm_.normalize(c, v);
      }
      recs.push_back(std::move(rec.data));
    }
    if (res == resolutions_.back() && !ids.empty())
      for (std::size_t c = 0; c < channels_; ++c) range_[c] = hi[c] - lo[c];
  }
}

ad::Tensor DatasetView::gather(std::span<const std::size_t> idx, std::size_t res, std::size_t offset,
                               std::size_t frames) const {
  const auto it = data_.find(res);
  if (it == data_.end()) throw io::FormatError("dataset view: resolution " + std::to_string(res) + " not loaded");
  const std::size_t plane = res * res;
  ad::Shape shape{idx.size(), channels_};
  if (options_.temporal) shape.push_back(frames);
  shape.push_back(res);
  shape.push_back(res);
  ad::Tensor out(shape);
  double* dst = out.data();
  for (std::size_t i : idx) {
    const auto [rec, t0] = samples_.at(i);
    const std::vector<double>& src = it->second[rec];
    for (std::size_t c = 0; c < channels_; ++c) {
      const double* from = src.data() + (c * frames_ + t0 + offset) * plane;
      dst = std::copy(from, from + frames * plane, dst);
    }
  }
  return out;
}

ad::Tensor DatasetView::inputs(std::span<const std::size_t> idx, std::size_t res) const {
  return gather(idx, res, 0, options_.temporal ? window_in_ : 1);
}

ad::Tensor DatasetView::targets(std::span<const std::size_t> idx, std::size_t res) const {
  return options_.temporal ? gather(idx, res, window_in_, window_out_) : gather(idx, res, 0, 1);
}

}  // namespace arbires::train
