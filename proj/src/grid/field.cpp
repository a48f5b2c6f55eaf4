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

#include "arbires/grid/field.hpp"

#include <cmath>
#include <numeric>

namespace arbires::grid {

Field::Field(std::size_t channels, std::size_t height, std::size_t width, double fill)
    : channels_(channels), height_(height), width_(width), data_(channels * height * width, fill) {
  if (channels == 0 || height == 0 || width == 0) throw GridError("field dimensions must be >= 1");
}

Field::Field(std::size_t channels, std::size_t height, std::size_t width, std::vector<double> data)
    : channels_(channels), height_(height), width_(width), data_(std::move(data)) {
  if (channels == 0 || height == 0 || width == 0) throw GridError("field dimensions must be >= 1");
  if (data_.size() != channels * height * width) {
    throw GridError("field data length " + std::to_string(data_.size()) + " does not match " +
                    std::to_string(channels) + "x" + std::to_string(height) + "x" + std::to_string(width));
  }
}

void Field::require_finite(std::string_view what) const {
  for (std::size_t c = 0; c < channels_; ++c) {
    for (double v : channel(c)) {
      if (!std::isfinite(v)) {
        throw GridError(std::string(what) + ": non-finite value in channel " + std::to_string(c));
      }
    }
  }
}

double Field::mean() const {
  return std::accumulate(data_.begin(), data_.end(), 0.0) / static_cast<double>(data_.size());
}

SpatioTemporalField::SpatioTemporalField(std::size_t channels, std::size_t frames, std::size_t height,
                                         std::size_t width, double dt)
    : channels_(channels),
      frames_(frames),
      height_(height),
      width_(width),
      dt_(dt),
      data_(channels * frames * height * width, 0.0) {
  if (channels == 0 || frames == 0 || height == 0 || width == 0) {
    throw GridError("spatio-temporal field dimensions must be >= 1");
  }
}

Field SpatioTemporalField::frame(std::size_t t) const {
  if (t >= frames_) throw GridError("frame index out of range");
  Field f(channels_, height_, width_);
  for (std::size_t c = 0; c < channels_; ++c)
    for (std::size_t i = 0; i < height_; ++i)
      for (std::size_t j = 0; j < width_; ++j) f.at(c, i, j) = at(c, t, i, j);
  return f;
}

void SpatioTemporalField::set_frame(std::size_t t, const Field& f) {
  if (t >= frames_ || f.channels() != channels_ || f.height() != height_ || f.width() != width_) {
    throw GridError("frame does not match spatio-temporal field layout");
  }
  for (std::size_t c = 0; c < channels_; ++c)
    for (std::size_t i = 0; i < height_; ++i)
      for (std::size_t j = 0; j < width_; ++j) at(c, t, i, j) = f.at(c, i, j);
}

Spectrum::Spectrum(std::size_t channels, std::size_t height, std::size_t width)
    : channels_(channels), height_(height), width_(width), coeffs_(channels * height * (width / 2 + 1)) {}

}  // namespace arbires::grid
