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

#include "arbires/io/plot.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace arbires::io {

namespace {

// 5x7 glyphs, one byte per row, bit 4 leftmost.
const std::map<char, std::array<std::uint8_t, 7>>& font() {
  static const std::map<char, std::array<std::uint8_t, 7>> glyphs = {
      {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}}, {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
      {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}}, {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
      {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}}, {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
      {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}}, {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
      {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}}, {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
      {'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}}, {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
      {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}}, {'D', {0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C}},
      {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}}, {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
      {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}}, {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
      {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}}, {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
      {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}}, {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
      {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}}, {'N', {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11}},
      {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}}, {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
      {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}}, {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
      {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}}, {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
      {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}}, {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
      {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}}, {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
      {'Y', {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04}}, {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
      {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}}, {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
      {'+', {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00}}, {':', {0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00}},
      {'/', {0x00, 0x01, 0x02, 0x04, 0x08, 0x10, 0x00}}, {'_', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1F}},
      {'(', {0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02}}, {')', {0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08}},
      {'=', {0x00, 0x00, 0x1F, 0x00, 0x1F, 0x00, 0x00}}, {',', {0x00, 0x00, 0x00, 0x00, 0x0C, 0x04, 0x08}},
  };
  return glyphs;
}

constexpr Rgb kBlack{0, 0, 0};
constexpr Rgb kGrey{200, 200, 200};
const std::vector<Rgb> kPalette = {{31, 119, 180}, {255, 127, 14}, {44, 160, 44},  {214, 39, 40},
                                   {148, 103, 189}, {140, 86, 75}, {227, 119, 194}, {23, 190, 207}};

std::string compact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Perceptually ordered blue -> yellow ramp.
Rgb sequential(double t) {
  static const Rgb stops[] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int k = std::min(3, static_cast<int>(t));
  const double f = t - k;
  Rgb c;
  for (int i = 0; i < 3; ++i) c[i] = static_cast<std::uint8_t>(std::lround(stops[k][i] + f * (stops[k + 1][i] - stops[k][i])));
  return c;
}

// Blue - white - red for t in [-1, 1].
Rgb diverging(double t) {
  t = std::clamp(t, -1.0, 1.0);
  const Rgb end = t < 0 ? Rgb{33, 102, 172} : Rgb{178, 24, 43};
  const double f = std::abs(t);
  Rgb c;
  for (int i = 0; i < 3; ++i) c[i] = static_cast<std::uint8_t>(std::lround(255 + f * (end[i] - 255.0)));
  return c;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct Subplot {
  std::string title;
  std::vector<Series> series;
};

void draw_subplot(Image& img, long x0, long y0, long w, long h, const Subplot& sp, const std::string& xlabel) {
  const long left = x0 + 62, right = x0 + w - 12, top = y0 + 24, bottom = y0 + h - 34;
  img.text(x0 + (w - Image::text_width(sp.title, 2)) / 2, y0 + 4, sp.title, kBlack, 2);
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  bool positive = true;
  for (const auto& s : sp.series)
    for (const auto& [x, y] : s.points) {
      xmin = std::min(xmin, x), xmax = std::max(xmax, x);
      ymin = std::min(ymin, y), ymax = std::max(ymax, y);
      positive = positive && y > 0;
    }
  img.line(left, top, left, bottom, kBlack);
  img.line(left, bottom, right, bottom, kBlack);
  if (!std::isfinite(xmin) || !std::isfinite(ymin)) {
    img.text(left + 8, (top + bottom) / 2, "NO DATA", kBlack);
    return;
  }
  const bool logy = positive && ymax / ymin > 20.0;
  auto ty = [&](double y) { return logy ? std::log10(y) : y; };
  double lo = ty(ymin), hi = ty(ymax);
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) lo -= 0.5, hi += 0.5;
  if (xmax - xmin < 1e-12) xmin -= 0.5, xmax += 0.5;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * static_cast<double>(right - left); };
  auto py = [&](double y) { return bottom - (ty(y) - lo) / (hi - lo) * static_cast<double>(bottom - top); };
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    const long yy = std::lround(bottom - (bottom - top) * k / 4.0);
    img.line(left, yy, right, yy, kGrey);
    const std::string label = compact(logy ? std::pow(10.0, v) : v);
    img.text(left - 4 - Image::text_width(label), yy - 3, label, kBlack);
    const double xv = xmin + (xmax - xmin) * k / 4.0;
    const long xx = std::lround(left + (right - left) * k / 4.0);
    const std::string xl = compact(xv);
    img.text(xx - Image::text_width(xl) / 2, bottom + 5, xl, kBlack);
  }
  img.text((left + right - Image::text_width(xlabel)) / 2, bottom + 17, xlabel + (logy ? "  (LOG Y)" : ""), kBlack);
  for (std::size_t s = 0; s < sp.series.size(); ++s) {
    const Rgb c = kPalette[s % kPalette.size()];
    const auto& pts = sp.series[s].points;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
      img.line(px(pts[i].first), py(pts[i].second), px(pts[i + 1].first), py(pts[i + 1].second), c);
    for (const auto& [x, y] : pts) img.fill_rect(std::lround(px(x)) - 2, std::lround(py(y)) - 2, std::lround(px(x)) + 2,
                                                 std::lround(py(y)) + 2, c);
    if (sp.series.size() > 1 || !sp.series[s].label.empty()) {
      const long ly = top + 4 + 10 * static_cast<long>(s);
      img.fill_rect(right - 120, ly, right - 112, ly + 6, c);
      img.text(right - 108, ly, sp.series[s].label, kBlack);
    }
  }
}

}  // namespace

Image::Image(std::size_t width, std::size_t height, Rgb background)
    : width_(width), height_(height), rgb_(3 * width * height) {
  for (std::size_t i = 0; i < width * height; ++i) std::copy(background.begin(), background.end(), rgb_.begin() + 3 * i);
}

Rgb Image::at(std::size_t x, std::size_t y) const {
  const std::size_t o = 3 * (y * width_ + x);
  return {rgb_.at(o), rgb_.at(o + 1), rgb_.at(o + 2)};
}

void Image::set(long x, long y, Rgb c) {
  if (x < 0 || y < 0 || x >= static_cast<long>(width_) || y >= static_cast<long>(height_)) return;
  std::copy(c.begin(), c.end(), rgb_.begin() + 3 * (static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x)));
}

void Image::fill_rect(long x0, long y0, long x1, long y1, Rgb c) {
  for (long y = y0; y <= y1; ++y)
    for (long x = x0; x <= x1; ++x) set(x, y, c);
}

void Image::line(double x0, double y0, double x1, double y1, Rgb c) {
  const double steps = std::max({std::abs(x1 - x0), std::abs(y1 - y0), 1.0});
  for (int k = 0; k <= static_cast<int>(std::ceil(steps)); ++k) {
    const double t = k / std::ceil(steps);
    set(std::lround(x0 + t * (x1 - x0)), std::lround(y0 + t * (y1 - y0)), c);
  }
}

void Image::text(long x, long y, const std::string& s, Rgb c, int scale) {
  for (char ch : s) {
    const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (const auto it = font().find(up); it != font().end())
      for (int r = 0; r < 7; ++r)
        for (int b = 0; b < 5; ++b)
          if (it->second[r] & (0x10 >> b)) fill_rect(x + b * scale, y + r * scale, x + (b + 1) * scale - 1, y + (r + 1) * scale - 1, c);
    x += 6 * scale;
  }
}

long Image::text_width(const std::string& s, int scale) { return static_cast<long>(s.size()) * 6 * scale; }

void write_png(const std::filesystem::path& path, const Image& image) {
  png_image desc{};
  desc.version = PNG_IMAGE_VERSION;
  desc.width = static_cast<png_uint_32>(image.width());
  desc.height = static_cast<png_uint_32>(image.height());
  desc.format = PNG_FORMAT_RGB;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  if (!png_image_write_to_file(&desc, tmp.c_str(), 0, image.pixels().data(), 0, nullptr))
    throw FormatError("cannot write " + path.string() + ": " + desc.message);
  std::filesystem::rename(tmp, path);
}

Image read_png(const std::filesystem::path& path) {
  png_image desc{};
  desc.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&desc, path.c_str()))
    throw FormatError("cannot read " + path.string() + ": " + desc.message);
  desc.format = PNG_FORMAT_RGB;
  Image img(desc.width, desc.height);
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(desc));
  if (!png_image_finish_read(&desc, nullptr, buf.data(), 0, nullptr))
    throw FormatError("cannot decode " + path.string() + ": " + desc.message);
  for (std::size_t y = 0; y < img.height(); ++y)
    for (std::size_t x = 0; x < img.width(); ++x) {
      const std::size_t o = 3 * (y * img.width() + x);
      img.set(static_cast<long>(x), static_cast<long>(y), {buf[o], buf[o + 1], buf[o + 2]});
    }
  return img;
}

Image plot_curves(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw FormatError("cannot read " + csv.string());
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (header.empty())
      header = split_csv(line);
    else
      rows.push_back(split_csv(line));
  }
  if (header.empty()) throw FormatError(csv.string() + ": no header row");
  auto column = [&](const std::string& name) -> long {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<long>(it - header.begin());
  };
  auto number = [](const std::vector<std::string>& row, long c, double& v) {
    if (c < 0 || static_cast<std::size_t>(c) >= row.size() || row[c].empty()) return false;
    try {
      v = std::stod(row[c]);
    } catch (const std::exception&) {
      return false;
    }
    return std::isfinite(v);
  };

  std::vector<Subplot> plots;
  std::string xlabel;
  if (header.front() == "epoch") {
    xlabel = "EPOCH";
    for (const char* metric : {"train_loss", "val_mse", "val_mae", "val_ssim"}) {
      Subplot sp{metric, {{"", {}}}};
      for (const auto& row : rows) {
        double x, y;
        if (number(row, 0, x) && number(row, column(metric), y)) sp.series[0].points.emplace_back(x, y);
      }
      plots.push_back(sp);
    }
  } else if (column("resolution") >= 0 && column("model") >= 0) {
    xlabel = "RESOLUTION";
    for (const char* metric : {"mae", "mse", "psnr", "ssim"}) {
      Subplot sp{metric, {}};
      std::map<std::string, std::size_t> index;
      for (const auto& row : rows) {
        double x, y;
        if (!number(row, column("resolution"), x) || !number(row, column(metric), y)) continue;
        const long lc = column("loss");
        const std::string label =
            row[column("model")] + (lc >= 0 && static_cast<std::size_t>(lc) < row.size() ? " " + row[lc] : "");
        if (!index.count(label)) index[label] = sp.series.size(), sp.series.push_back({label, {}});
        sp.series[index[label]].points.emplace_back(x, y);
      }
      for (auto& s : sp.series) std::sort(s.points.begin(), s.points.end());
      plots.push_back(sp);
    }
  } else {
    throw FormatError(csv.string() + ": neither a training log nor a result table");
  }

  const long pw = 420, ph = 300;
  Image img(2 * pw, ph * static_cast<long>((plots.size() + 1) / 2));
  for (std::size_t k = 0; k < plots.size(); ++k)
    draw_subplot(img, pw * static_cast<long>(k % 2), ph * static_cast<long>(k / 2), pw, ph, plots[k], xlabel);
  return img;
}

Image plot_panels(const Grd1Record& prediction, const Grd1Record& truth) {
  if (prediction.dims != truth.dims) throw FormatError("panels: prediction and ground truth shapes differ");
  const auto& d = truth.dims;
  if (d.size() != 3 && d.size() != 4) throw FormatError("panels: expected [C, H, W] or [C, T, H, W] records");
  const std::size_t channels = d[0], frames = d.size() == 4 ? d[1] : 1, h = d[d.size() - 2], w = d[d.size() - 1];
  const std::size_t rows = channels * frames;
  const long cell = static_cast<long>(std::max<std::size_t>(1, 160 / std::max(h, w)));
  const long pw = cell * static_cast<long>(w), ph = cell * static_cast<long>(h);
  const long margin = 10, title = 24, label = 14;
  Image img(3 * pw + 4 * margin, title + static_cast<long>(rows) * (ph + label + margin) + margin);
  const char* names[] = {"PREDICTION", "GROUND TRUTH", "DIFFERENCE"};
  for (int k = 0; k < 3; ++k)
    img.text(margin + k * (pw + margin) + (pw - Image::text_width(names[k])) / 2, 8, names[k], kBlack);

  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t c = r / frames, t = r % frames;
    const double* p = prediction.data.data() + r * h * w;
    const double* g = truth.data.data() + r * h * w;
    double lo = INFINITY, hi = -INFINITY, dmax = 0;
    for (std::size_t i = 0; i < h * w; ++i) {
      lo = std::min({lo, p[i], g[i]}), hi = std::max({hi, p[i], g[i]});
      dmax = std::max(dmax, std::abs(p[i] - g[i]));
    }
    if (!(hi > lo)) hi = lo + 1;
    if (!(dmax > 0)) dmax = 1;
    const long y0 = title + static_cast<long>(r) * (ph + label + margin);
    std::string tag = c < truth.names.size() ? truth.names[c] : "CHANNEL " + std::to_string(c);
    if (frames > 1) tag += " T=" + std::to_string(t);
    img.text(margin, y0, tag + "  RANGE " + compact(lo) + " TO " + compact(hi) + "  MAX DIFF " + compact(dmax), kBlack);
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < w; ++j) {
        const double v[3] = {(p[i * w + j] - lo) / (hi - lo), (g[i * w + j] - lo) / (hi - lo),
                             (p[i * w + j] - g[i * w + j]) / dmax};
        for (int k = 0; k < 3; ++k) {
          const long x = margin + k * (pw + margin) + cell * static_cast<long>(j);
          const long y = y0 + label + cell * static_cast<long>(i);
          img.fill_rect(x, y, x + cell - 1, y + cell - 1, k < 2 ? sequential(v[k]) : diverging(v[k]));
        }
      }
  }
  return img;
}

}  // namespace arbires::io
