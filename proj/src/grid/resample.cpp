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

#include "arbires/grid/resample.hpp"

#include <cmath>
#include <string>

namespace arbires::grid {

namespace {

std::size_t wrap_index(long i, std::size_t n, Boundary b) {
  const long nn = static_cast<long>(n);
  if (b == Boundary::Periodic) return static_cast<std::size_t>(((i % nn) + nn) % nn);
  if (i < 0) return 0;
  if (i >= nn) return n - 1;
  return static_cast<std::size_t>(i);
}

double cubic_kernel(double x) {
  constexpr double a = kBicubicA;
  x = std::abs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

}  // namespace

const char* mode_name(ResampleMode mode) {
  switch (mode) {
    case ResampleMode::Nearest: return "nearest";
    case ResampleMode::Bilinear: return "bilinear";
    case ResampleMode::Bicubic: return "bicubic";
    case ResampleMode::AveragePool: return "average-pool";
  }
  return "?";
}

ResampleMode parse_mode(const std::string& name) {
  if (name == "nearest") return ResampleMode::Nearest;
  if (name == "bilinear") return ResampleMode::Bilinear;
  if (name == "bicubic") return ResampleMode::Bicubic;
  if (name == "average-pool" || name == "pool") return ResampleMode::AveragePool;
  throw GridError("unknown resample mode '" + name + "'");
}

const char* boundary_name(Boundary b) { return b == Boundary::Periodic ? "periodic" : "replicate"; }

Boundary parse_boundary(const std::string& name) {
  if (name == "periodic") return Boundary::Periodic;
  if (name == "replicate") return Boundary::Replicate;
  throw GridError("unknown boundary '" + name + "'");
}

InterpTable make_interp_table(ResampleMode mode, Boundary boundary, std::size_t in_size, std::size_t out_size) {
  if (in_size == 0 || out_size == 0) throw GridError("interpolation sizes must be >= 1");
  InterpTable t;
  t.in_size = in_size;
  t.out_size = out_size;
  switch (mode) {
    case ResampleMode::Nearest: t.taps = 1; break;
    case ResampleMode::Bilinear: t.taps = 2; break;
    case ResampleMode::Bicubic: t.taps = 4; break;
    case ResampleMode::AveragePool: throw GridError("average-pool has no interpolation table");
  }
  t.index.resize(out_size * t.taps);
  t.weight.resize(out_size * t.taps);
  const double ratio = static_cast<double>(in_size) / static_cast<double>(out_size);
  for (std::size_t o = 0; o < out_size; ++o) {
    const double u = (static_cast<double>(o) + 0.5) * ratio - 0.5;
    std::size_t* idx = t.index.data() + o * t.taps;
    double* w = t.weight.data() + o * t.taps;
    if (mode == ResampleMode::Nearest) {
      idx[0] = wrap_index(static_cast<long>(std::floor(u + 0.5)), in_size, boundary);
      w[0] = 1.0;
      continue;
    }
    const double f = std::floor(u);
    const long i0 = static_cast<long>(f);
    const double s = u - f;
    if (mode == ResampleMode::Bilinear) {
      idx[0] = wrap_index(i0, in_size, boundary);
      idx[1] = wrap_index(i0 + 1, in_size, boundary);
      w[0] = 1.0 - s;
      w[1] = s;
    } else {
      for (int k = 0; k < 4; ++k) {
        idx[k] = wrap_index(i0 - 1 + k, in_size, boundary);
        w[k] = cubic_kernel(s - static_cast<double>(k - 1));
      }
    }
  }
  return t;
}

InterpTable make_bicubic_sampling_table(Boundary boundary, std::size_t in_size, std::size_t out_size) {
  return make_interp_table(ResampleMode::Bicubic, boundary, in_size, out_size);
}

void apply_separable(const InterpTable& rows, const InterpTable& cols, std::size_t planes, const double* in,
                     double* out) {
  const std::size_t ih = rows.in_size, iw = cols.in_size, oh = rows.out_size, ow = cols.out_size;
  std::vector<double> tmp(oh * iw);
  for (std::size_t p = 0; p < planes; ++p) {
    const double* src = in + p * ih * iw;
    double* dst = out + p * oh * ow;
    std::fill(tmp.begin(), tmp.end(), 0.0);
    for (std::size_t o = 0; o < oh; ++o) {
      double* trow = tmp.data() + o * iw;
      for (std::size_t t = 0; t < rows.taps; ++t) {
        const double w = rows.weight[o * rows.taps + t];
        const double* srow = src + rows.index[o * rows.taps + t] * iw;
        for (std::size_t j = 0; j < iw; ++j) trow[j] += w * srow[j];
      }
    }
    for (std::size_t o = 0; o < oh; ++o) {
      const double* trow = tmp.data() + o * iw;
      double* drow = dst + o * ow;
      for (std::size_t q = 0; q < ow; ++q) {
        double acc = 0.0;
        for (std::size_t t = 0; t < cols.taps; ++t) acc += cols.weight[q * cols.taps + t] * trow[cols.index[q * cols.taps + t]];
        drow[q] = acc;
      }
    }
  }
}

void apply_separable_adjoint(const InterpTable& rows, const InterpTable& cols, std::size_t planes,
                             const double* grad_out, double* grad_in) {
  const std::size_t ih = rows.in_size, iw = cols.in_size, oh = rows.out_size, ow = cols.out_size;
  std::vector<double> tmp(oh * iw);
  for (std::size_t p = 0; p < planes; ++p) {
    const double* g = grad_out + p * oh * ow;
    double* gi = grad_in + p * ih * iw;
    std::fill(tmp.begin(), tmp.end(), 0.0);
    for (std::size_t o = 0; o < oh; ++o) {
      const double* grow = g + o * ow;
      double* trow = tmp.data() + o * iw;
      for (std::size_t q = 0; q < ow; ++q)
        for (std::size_t t = 0; t < cols.taps; ++t) trow[cols.index[q * cols.taps + t]] += cols.weight[q * cols.taps + t] * grow[q];
    }
    for (std::size_t o = 0; o < oh; ++o) {
      const double* trow = tmp.data() + o * iw;
      for (std::size_t t = 0; t < rows.taps; ++t) {
        const double w = rows.weight[o * rows.taps + t];
        double* dst = gi + rows.index[o * rows.taps + t] * iw;
        for (std::size_t j = 0; j < iw; ++j) dst[j] += w * trow[j];
      }
    }
  }
}

void average_pool_planes(std::size_t planes, std::size_t height, std::size_t width, std::size_t factor,
                         const double* in, double* out) {
  const std::size_t oh = height / factor, ow = width / factor;
  const double inv = 1.0 / static_cast<double>(factor * factor);
  for (std::size_t p = 0; p < planes; ++p) {
    const double* src = in + p * height * width;
    double* dst = out + p * oh * ow;
    for (std::size_t i = 0; i < oh; ++i) {
      for (std::size_t j = 0; j < ow; ++j) {
        double acc = 0.0;
        for (std::size_t a = 0; a < factor; ++a)
          for (std::size_t b = 0; b < factor; ++b) acc += src[(i * factor + a) * width + j * factor + b];
        dst[i * ow + j] = acc * inv;
      }
    }
  }
}

Field average_pool(const Field& field, std::size_t factor) {
  if (factor == 0 || field.height() % factor != 0 || field.width() % factor != 0) {
    throw GridError("average-pool factor " + std::to_string(factor) + " does not divide " +
                    std::to_string(field.height()) + "x" + std::to_string(field.width()));
  }
  Field out(field.channels(), field.height() / factor, field.width() / factor);
  average_pool_planes(field.channels(), field.height(), field.width(), factor, field.data().data(),
                      out.data().data());
  return out;
}

Field resample(const Field& field, const ResampleSpec& spec, std::size_t out_height, std::size_t out_width) {
  if (out_height == 0 || out_width == 0) throw GridError("resample target must be >= 1x1");
  const std::size_t h = field.height(), w = field.width();
  if (spec.mode == ResampleMode::AveragePool) {
    if (out_height > h || out_width > w || h % out_height != 0 || w % out_width != 0 ||
        h / out_height != w / out_width) {
      throw GridError("average-pool needs equal integer ratios; got " + std::to_string(h) + "x" +
                      std::to_string(w) + " -> " + std::to_string(out_height) + "x" + std::to_string(out_width));
    }
    return average_pool(field, h / out_height);
  }
  if (out_height < h || out_width < w) {
    throw GridError(std::string("resample: ") + mode_name(spec.mode) +
                    " cannot downsample; use average-pool (" + std::to_string(h) + "x" + std::to_string(w) +
                    " -> " + std::to_string(out_height) + "x" + std::to_string(out_width) + ")");
  }
  const InterpTable rows = make_interp_table(spec.mode, spec.boundary, h, out_height);
  const InterpTable cols = make_interp_table(spec.mode, spec.boundary, w, out_width);
  Field out(field.channels(), out_height, out_width);
  apply_separable(rows, cols, field.channels(), field.data().data(), out.data().data());
  return out;
}

}  // namespace arbires::grid
