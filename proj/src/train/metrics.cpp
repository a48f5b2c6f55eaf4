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

#include "arbires/train/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace arbires::train {

namespace {

void check_sizes(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("metric: sizes " + std::to_string(a.size()) + " and " + std::to_string(b.size()) +
                                " do not match");
}

// Row of truncated, renormalised Gaussian weights for every output position.
std::vector<double> window_weights(std::size_t n, const SsimParams& p, std::vector<std::size_t>& lo,
                                   std::vector<std::size_t>& len) {
  const long half = static_cast<long>(p.window / 2);
  std::vector<double> out;
  lo.assign(n, 0);
  len.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const long a = std::max(0L, static_cast<long>(i) - half);
    const long b = std::min(static_cast<long>(n) - 1, static_cast<long>(i) + half);
    lo[i] = out.size();
    len[i] = static_cast<std::size_t>(b - a + 1);
    double sum = 0.0;
    for (long k = a; k <= b; ++k) {
      const double d = static_cast<double>(k - static_cast<long>(i));
      out.push_back(std::exp(-d * d / (2 * p.sigma * p.sigma)));
      sum += out.back();
    }
    for (std::size_t k = lo[i]; k < out.size(); ++k) out[k] /= sum;
  }
  return out;
}

}  // namespace

const char* loss_name(LossKind k) { return k == LossKind::L1 ? "l1" : "l2"; }

LossKind parse_loss(const std::string& s) {
  if (s == "l1" || s == "L1" || s == "mae") return LossKind::L1;
  if (s == "l2" || s == "L2" || s == "mse") return LossKind::L2;
  throw std::invalid_argument("unknown loss '" + s + "'");
}

ad::Var loss(LossKind kind, ad::Var pred, ad::Var target) {
  if (pred.shape() != target.shape())
    throw ad::AdError("loss: prediction " + ad::shape_str(pred.shape()) + " and target " +
                      ad::shape_str(target.shape()) + " differ");
  const ad::Var diff = ad::sub(pred, target);
  return kind == LossKind::L1 ? ad::mean_abs(diff) : ad::mean_square(diff);
}

double mae(std::span<const double> pred, std::span<const double> target) {
  check_sizes(pred, target);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - target[i]);
  return s / static_cast<double>(pred.size());
}

double mse(std::span<const double> pred, std::span<const double> target) {
  check_sizes(pred, target);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - target[i]) * (pred[i] - target[i]);
  return s / static_cast<double>(pred.size());
}

double psnr_from_mse(double m, double peak) {
  if (!(peak > 0.0)) throw std::invalid_argument("psnr: peak must be positive, got " + std::to_string(peak));
  if (m == 0.0) return kPsnrIdentical;
  return 10.0 * std::log10(peak * peak / m);
}

double psnr(std::span<const double> pred, std::span<const double> target, double peak) {
  return psnr_from_mse(mse(pred, target), peak);
}

double ssim_plane(const double* x, const double* y, std::size_t h, std::size_t w, double range, const SsimParams& p) {
  if (!(range > 0.0)) throw std::invalid_argument("ssim: data range must be positive");
  std::vector<std::size_t> rlo, rlen, clo, clen;
  const std::vector<double> rw = window_weights(h, p, rlo, rlen);
  const std::vector<double> cw = window_weights(w, p, clo, clen);
  const long half = static_cast<long>(p.window / 2);
  // Horizontal pass of x, y, xx, yy, xy.
  std::vector<double> tmp(5 * h * w);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j) {
      const std::size_t j0 = static_cast<std::size_t>(std::max(0L, static_cast<long>(j) - half));
      double m[5] = {0, 0, 0, 0, 0};
      for (std::size_t k = 0; k < clen[j]; ++k) {
        const double wt = cw[clo[j] + k];
        const double a = x[i * w + j0 + k], b = y[i * w + j0 + k];
        m[0] += wt * a;
        m[1] += wt * b;
        m[2] += wt * a * a;
        m[3] += wt * b * b;
        m[4] += wt * a * b;
      }
      for (int q = 0; q < 5; ++q) tmp[q * h * w + i * w + j] = m[q];
    }
  const double c1 = (p.k1 * range) * (p.k1 * range), c2 = (p.k2 * range) * (p.k2 * range);
  double total = 0.0;
  for (std::size_t i = 0; i < h; ++i) {
    const std::size_t i0 = static_cast<std::size_t>(std::max(0L, static_cast<long>(i) - half));
    for (std::size_t j = 0; j < w; ++j) {
      double m[5] = {0, 0, 0, 0, 0};
      for (std::size_t k = 0; k < rlen[i]; ++k) {
        const double wt = rw[rlo[i] + k];
        for (int q = 0; q < 5; ++q) m[q] += wt * tmp[q * h * w + (i0 + k) * w + j];
      }
      const double vx = m[2] - m[0] * m[0], vy = m[3] - m[1] * m[1], cxy = m[4] - m[0] * m[1];
      total += ((2 * m[0] * m[1] + c1) * (2 * cxy + c2)) / ((m[0] * m[0] + m[1] * m[1] + c1) * (vx + vy + c2));
    }
  }
  return total / static_cast<double>(h * w);
}

double ssim(const double* pred, const double* target, std::size_t planes, std::size_t h, std::size_t w, double range,
            const SsimParams& params) {
  double s = 0.0;
  for (std::size_t p = 0; p < planes; ++p) s += ssim_plane(pred + p * h * w, target + p * h * w, h, w, range, params);
  return s / static_cast<double>(planes);
}

}  // namespace arbires::train
