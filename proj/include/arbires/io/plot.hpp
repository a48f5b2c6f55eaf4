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

// Minimal raster figures for the CLI: RGB images, PNG output, a line-plot
// grid for training logs and result tables, and field panels.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "arbires/io/grd1.hpp"

namespace arbires::io {

using Rgb = std::array<std::uint8_t, 3>;

class Image {
 public:
  Image(std::size_t width, std::size_t height, Rgb background = {255, 255, 255});

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  const std::vector<std::uint8_t>& pixels() const { return rgb_; }
  Rgb at(std::size_t x, std::size_t y) const;

  /// Out-of-range coordinates are clipped.
  void set(long x, long y, Rgb c);
  void fill_rect(long x0, long y0, long x1, long y1, Rgb c);
  void line(double x0, double y0, double x1, double y1, Rgb c);
  /// 5x7 glyphs scaled by `scale`; lower case renders as upper case and
  /// unknown characters as blanks.
  void text(long x, long y, const std::string& s, Rgb c, int scale = 1);
  static long text_width(const std::string& s, int scale = 1);

 private:
  std::size_t width_, height_;
  std::vector<std::uint8_t> rgb_;
};

/// 8-bit RGB. Written atomically.
void write_png(const std::filesystem::path& path, const Image& image);
Image read_png(const std::filesystem::path& path);

/// One subplot per metric column. Training logs (header starting with
/// "epoch") plot against epoch; result tables plot against resolution with
/// one line per model/loss pair. Comment lines starting with '#' are skipped.
Image plot_curves(const std::filesystem::path& csv);

/// One row per channel (per channel and frame for [C, T, H, W] records):
/// prediction | ground truth | difference. Prediction and truth share a
/// colour scale; the difference uses a symmetric diverging scale.
Image plot_panels(const Grd1Record& prediction, const Grd1Record& truth);

}  // namespace arbires::io
