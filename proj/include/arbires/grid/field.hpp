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

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace arbires::grid {

using cplx = std::complex<double>;

/// Raised for malformed grids, bad shapes and non-finite data.
class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Real samples on the periodic unit square, stored [C, H, W] row-major.
/// Sample (i, j) belongs to the cell centred at (x1, x2) = ((j + 1/2) / W,
/// (i + 1/2) / H), so a k-fold average pool lands on the coarse cell
/// centres exactly.
class Field {
 public:
  Field() = default;
  Field(std::size_t channels, std::size_t height, std::size_t width, double fill = 0.0);
  Field(std::size_t channels, std::size_t height, std::size_t width, std::vector<double> data);

  std::size_t channels() const { return channels_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t plane() const { return height_ * width_; }
  std::size_t size() const { return data_.size(); }

  double& at(std::size_t c, std::size_t i, std::size_t j) { return data_[(c * height_ + i) * width_ + j]; }
  double at(std::size_t c, std::size_t i, std::size_t j) const {
    return data_[(c * height_ + i) * width_ + j];
  }

  std::span<double> channel(std::size_t c) { return {data_.data() + c * plane(), plane()}; }
  std::span<const double> channel(std::size_t c) const { return {data_.data() + c * plane(), plane()}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  /// Throws GridError naming the first channel holding NaN or Inf.
  void require_finite(std::string_view what = "field") const;
  double mean() const;

 private:
  std::size_t channels_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> data_;
};

/// Time-windowed field stored [C, T, H, W].
class SpatioTemporalField {
 public:
  SpatioTemporalField() = default;
  SpatioTemporalField(std::size_t channels, std::size_t frames, std::size_t height, std::size_t width,
                      double dt = 1.0);

  std::size_t channels() const { return channels_; }
  std::size_t frames() const { return frames_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  double dt() const { return dt_; }

  double& at(std::size_t c, std::size_t t, std::size_t i, std::size_t j) {
    return data_[((c * frames_ + t) * height_ + i) * width_ + j];
  }
  double at(std::size_t c, std::size_t t, std::size_t i, std::size_t j) const {
    return data_[((c * frames_ + t) * height_ + i) * width_ + j];
  }

  Field frame(std::size_t t) const;
  void set_frame(std::size_t t, const Field& f);

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t channels_ = 0;
  std::size_t frames_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  double dt_ = 1.0;
  std::vector<double> data_;
};

/// Half-spectrum of a real field: coeffs [C, H, W/2 + 1], unnormalized forward.
class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(std::size_t channels, std::size_t height, std::size_t width);

  std::size_t channels() const { return channels_; }
  std::size_t height() const { return height_; }
  /// Width of the real grid this spectrum came from.
  std::size_t width() const { return width_; }
  std::size_t half_width() const { return width_ / 2 + 1; }
  std::size_t plane() const { return height_ * half_width(); }

  cplx& at(std::size_t c, std::size_t i, std::size_t j) { return coeffs_[(c * height_ + i) * half_width() + j]; }
  cplx at(std::size_t c, std::size_t i, std::size_t j) const {
    return coeffs_[(c * height_ + i) * half_width() + j];
  }

  /// Signed row frequency k_y for row index i (Nyquist row maps to -H/2).
  long ky(std::size_t i) const { return signed_frequency(i, height_); }
  /// Column frequency k_x for half-spectrum column j.
  long kx(std::size_t j) const { return static_cast<long>(j); }

  std::vector<cplx>& coeffs() { return coeffs_; }
  const std::vector<cplx>& coeffs() const { return coeffs_; }

  static long signed_frequency(std::size_t index, std::size_t n) {
    const long k = static_cast<long>(index);
    return 2 * k >= static_cast<long>(n) ? k - static_cast<long>(n) : k;
  }

 private:
  std::size_t channels_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<cplx> coeffs_;
};

}  // namespace arbires::grid
