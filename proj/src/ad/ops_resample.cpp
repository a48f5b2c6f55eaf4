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

#include <memory>
#include "ops_internal.hpp"

namespace arbires::ad {

using detail::require;

namespace {

std::size_t planes_of(const Shape& s) { return shape_numel(s) / (s[s.size() - 2] * s[s.size() - 1]); }

}  // namespace

Var interpolate(Var x, std::size_t out_h, std::size_t out_w, grid::ResampleMode mode, grid::Boundary boundary) {
  const Shape& s = x.shape();
  require(!x.is_complex() && s.size() >= 2, "interpolate: real input with >= 2 axes required");
  const std::size_t h = s[s.size() - 2], w = s[s.size() - 1];
  require(out_h >= h && out_w >= w, "interpolate: target " + std::to_string(out_h) + "x" + std::to_string(out_w) +
                                        " is smaller than input " + shape_str(s));
  auto rows = std::make_shared<grid::InterpTable>(grid::make_interp_table(mode, boundary, h, out_h));
  auto cols = std::make_shared<grid::InterpTable>(grid::make_interp_table(mode, boundary, w, out_w));
  const std::size_t planes = planes_of(s);
  Shape os = s;
  os[s.size() - 2] = out_h;
  os[s.size() - 1] = out_w;
  Tensor out(os);
  grid::apply_separable(*rows, *cols, planes, x.value().data(), out.data());
  const std::size_t ix = x.id();
  return x.graph().make("interpolate", {x}, std::move(out), false, [ix, rows, cols, planes](Graph& g, const Tensor& go) {
    grid::apply_separable_adjoint(*rows, *cols, planes, go.data(), g.grad_slot(ix).data());
  });
}

Var avg_pool(Var x, std::size_t factor) {
  const Shape& s = x.shape();
  require(!x.is_complex() && s.size() >= 2, "avg_pool: real input with >= 2 axes required");
  const std::size_t h = s[s.size() - 2], w = s[s.size() - 1];
  require(factor >= 1 && h % factor == 0 && w % factor == 0,
          "avg_pool: factor " + std::to_string(factor) + " does not divide " + shape_str(s));
  const std::size_t planes = planes_of(s);
  Shape os = s;
  os[s.size() - 2] = h / factor;
  os[s.size() - 1] = w / factor;
  Tensor out(os);
  grid::average_pool_planes(planes, h, w, factor, x.value().data(), out.data());
  const std::size_t ix = x.id();
  return x.graph().make("avg_pool", {x}, std::move(out), false, [=](Graph& g, const Tensor& go) {
    Tensor& slot = g.grad_slot(ix);
    const double inv = 1.0 / static_cast<double>(factor * factor);
    const std::size_t oh = h / factor, ow = w / factor;
    for (std::size_t p = 0; p < planes; ++p)
      for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j)
          slot[(p * h + i) * w + j] += inv * go[(p * oh + i / factor) * ow + j / factor];
  });
}

namespace {

// Index pairs (fine offset, patch offset) within one plane.
std::vector<std::size_t> patch_map(std::size_t h, std::size_t w, std::size_t f) {
  std::vector<std::size_t> map(h * w);
  const std::size_t pw = w / f;
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j)
      map[i * w + j] = ((i / f) * pw + j / f) * f * f + (i % f) * f + j % f;
  return map;
}

}  // namespace

Var patchify(Var x, std::size_t factor) {
  const Shape& s = x.shape();
  require(!x.is_complex() && s.size() >= 2, "patchify: real input with >= 2 axes required");
  const std::size_t h = s[s.size() - 2], w = s[s.size() - 1];
  require(factor >= 1 && h % factor == 0 && w % factor == 0,
          "patchify: factor " + std::to_string(factor) + " does not divide " + shape_str(s));
  const std::size_t planes = planes_of(s), plane = h * w;
  const std::vector<std::size_t> map = patch_map(h, w, factor);
  Shape os(s.begin(), s.end() - 2);
  os.insert(os.end(), {h / factor, w / factor, factor * factor});
  Tensor out(os);
  const Tensor& xv = x.value();
  for (std::size_t p = 0; p < planes; ++p)
    for (std::size_t k = 0; k < plane; ++k) out[p * plane + map[k]] = xv[p * plane + k];
  const std::size_t ix = x.id();
  return x.graph().make("patchify", {x}, std::move(out), false, [ix, map, planes, plane](Graph& g, const Tensor& go) {
    Tensor& slot = g.grad_slot(ix);
    for (std::size_t p = 0; p < planes; ++p)
      for (std::size_t k = 0; k < plane; ++k) slot[p * plane + k] += go[p * plane + map[k]];
  });
}

Var unpatchify(Var x, std::size_t factor) {
  const Shape& s = x.shape();
  require(!x.is_complex() && s.size() >= 3 && s.back() == factor * factor,
          "unpatchify: last axis of " + shape_str(s) + " must be factor^2");
  const std::size_t h = s[s.size() - 3] * factor, w = s[s.size() - 2] * factor;
  const std::size_t plane = h * w, planes = shape_numel(s) / plane;
  const std::vector<std::size_t> map = patch_map(h, w, factor);
  Shape os(s.begin(), s.end() - 3);
  os.insert(os.end(), {h, w});
  Tensor out(os);
  const Tensor& xv = x.value();
  for (std::size_t p = 0; p < planes; ++p)
    for (std::size_t k = 0; k < plane; ++k) out[p * plane + k] = xv[p * plane + map[k]];
  const std::size_t ix = x.id();
  return x.graph().make("unpatchify", {x}, std::move(out), false, [ix, map, planes, plane](Graph& g, const Tensor& go) {
    Tensor& slot = g.grad_slot(ix);
    for (std::size_t p = 0; p < planes; ++p)
      for (std::size_t k = 0; k < plane; ++k) slot[p * plane + map[k]] += go[p * plane + k];
  });
}

namespace {

// Copies the leading min-size block of each [ih, iw] plane into [oh, ow].
void copy_block(std::size_t planes, std::size_t ih, std::size_t iw, std::size_t oh, std::size_t ow, const double* in,
                double* out, bool accumulate) {
  const std::size_t h = std::min(ih, oh), w = std::min(iw, ow);
  for (std::size_t p = 0; p < planes; ++p)
    for (std::size_t i = 0; i < h; ++i) {
      const double* src = in + (p * ih + i) * iw;
      double* dst = out + (p * oh + i) * ow;
      if (accumulate)
        for (std::size_t j = 0; j < w; ++j) dst[j] += src[j];
      else
        std::copy(src, src + w, dst);
    }
}

Var resize_block(Var x, std::size_t oh, std::size_t ow, const char* op) {
  const Shape& s = x.shape();
  require(!x.is_complex() && s.size() >= 2, std::string(op) + ": real input with >= 2 axes required");
  const std::size_t ih = s[s.size() - 2], iw = s[s.size() - 1], planes = planes_of(s);
  Shape os = s;
  os[s.size() - 2] = oh;
  os[s.size() - 1] = ow;
  Tensor out(os);
  copy_block(planes, ih, iw, oh, ow, x.value().data(), out.data(), false);
  const std::size_t ix = x.id();
  return x.graph().make(op, {x}, std::move(out), false, [=](Graph& g, const Tensor& go) {
    copy_block(planes, oh, ow, ih, iw, go.data(), g.grad_slot(ix).data(), true);
  });
}

}  // namespace

Var pad_end(Var x, std::size_t rows, std::size_t cols) {
  require(x.shape().size() >= 2, "pad_end: input with >= 2 axes required");
  const Shape& s = x.shape();
  return resize_block(x, s[s.size() - 2] + rows, s[s.size() - 1] + cols, "pad_end");
}

Var crop(Var x, std::size_t h, std::size_t w) {
  const Shape& s = x.shape();
  require(s.size() >= 2 && h >= 1 && w >= 1 && h <= s[s.size() - 2] && w <= s[s.size() - 1],
          "crop: " + std::to_string(h) + "x" + std::to_string(w) + " does not fit " + shape_str(s));
  return resize_block(x, h, w, "crop");
}

Var mul_broadcast_last(Var p, Var a) {
  const Shape& ps = p.shape();
  const Shape& as = a.shape();
  require(!p.is_complex() && !a.is_complex() && ps.size() == as.size() + 1 &&
              Shape(ps.begin(), ps.end() - 1) == as,
          "mul_broadcast_last: shape mismatch " + shape_str(ps) + " vs " + shape_str(as));
  const std::size_t k = ps.back(), n = a.value().size();
  Tensor out(ps);
  const Tensor& pv = p.value();
  const Tensor& av = a.value();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) out[i * k + j] = pv[i * k + j] * av[i];
  const std::size_t ip = p.id(), ia = a.id();
  return p.graph().make("mul_broadcast_last", {p, a}, std::move(out), false, [=](Graph& g, const Tensor& go) {
    const Tensor& pv = g.node(ip).value;
    const Tensor& av = g.node(ia).value;
    if (g.requires_grad(ip)) {
      Tensor& s = g.grad_slot(ip);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) s[i * k + j] += go[i * k + j] * av[i];
    }
    if (g.requires_grad(ia)) {
      Tensor& s = g.grad_slot(ia);
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < k; ++j) acc += go[i * k + j] * pv[i * k + j];
        s[i] += acc;
      }
    }
  });
}

}  // namespace arbires::ad
