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

#include "arbires/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

#include "arbires/grid/sobel.hpp"

namespace arbires::nn {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ad::AdError(msg);
}

Var p(Graph& g, ParamStore& store, const std::string& name) { return g.param(store, name); }

}  // namespace

ad::Tensor uniform(Shape shape, double bound, Rng& rng) {
  std::uniform_real_distribution<double> u(-bound, bound);
  ad::Tensor t(std::move(shape));
  for (double& v : t.storage()) v = u(rng);
  return t;
}

void Pointwise::init(ParamStore& store, Rng& rng) const {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  store.add(name + ".w", uniform({out, in}, bound, rng));
  store.add(name + ".b", uniform({out}, bound, rng));
}

void Pointwise::zero(ParamStore& store) const {
  store.at(name + ".w").value.fill(0.0);
  store.at(name + ".b").value.fill(0.0);
}

Var Pointwise::forward(Graph& g, ParamStore& store, Var x) const {
  require(x.dim(1) == in, name + ": expected " + std::to_string(in) + " channels, got " + ad::shape_str(x.shape()));
  return ad::conv1x1(x, p(g, store, name + ".w"), p(g, store, name + ".b"));
}

void Conv2d::init(ParamStore& store, Rng& rng) const {
  require(kernel % 2 == 1, name + ": kernel must be odd");
  const double bound = 1.0 / std::sqrt(static_cast<double>(in * kernel * kernel));
  store.add(name + ".w", uniform({out, in, kernel, kernel}, bound, rng));
  store.add(name + ".b", uniform({out}, bound, rng));
}

Var Conv2d::forward(Graph& g, ParamStore& store, Var x) const {
  require(x.shape().size() == 4 && x.dim(1) == in,
          name + ": expected [N, " + std::to_string(in) + ", H, W], got " + ad::shape_str(x.shape()));
  return ad::conv2d(x, p(g, store, name + ".w"), p(g, store, name + ".b"), 1, kernel / 2);
}

Shape SpectralConv::weight_shape() const {
  Shape s;
  for (std::size_t a = 0; a < modes.size(); ++a) s.push_back(a + 1 < modes.size() ? 2 * modes[a] : modes[a]);
  s.push_back(in);
  s.push_back(out);
  return s;
}

void SpectralConv::init(ParamStore& store, Rng& rng) const {
  require(modes.size() == 2 || modes.size() == 3, name + ": 2 or 3 transformed axes supported");
  const double scale = 1.0 / static_cast<double>(in * out);
  std::uniform_real_distribution<double> u(0.0, scale);
  for (const char* part : {".wr", ".wi"}) {
    ad::Tensor t(weight_shape());
    for (double& v : t.storage()) v = u(rng);
    store.add(name + part, std::move(t));
  }
}

Var SpectralConv::forward(Graph& g, ParamStore& store, Var x) const {
  const Shape& s = x.shape();
  const std::size_t rank = modes.size();
  require(s.size() == rank + 2 && s[1] == in, name + ": expected " + std::to_string(rank + 2) + "-d input with " +
                                                  std::to_string(in) + " channels, got " + ad::shape_str(s));
  const Shape dims(s.begin() + 2, s.end());
  for (std::size_t a = 0; a < rank; ++a)
    require(2 * modes[a] <= dims[a], name + ": " + std::to_string(modes[a]) + " modes exceed the Nyquist limit of a " +
                                         std::to_string(dims[a]) + "-point axis in " + ad::shape_str(s));
  Var w = ad::complex_from_parts(p(g, store, name + ".wr"), p(g, store, name + ".wi"));
  Var spec = ad::mode_truncate(ad::rfft(x, rank), modes);
  return ad::irfft(ad::mode_pad(ad::spectral_mix(spec, w), dims), dims);
}

FourierBlock::FourierBlock(const std::string& name, std::size_t width, Shape modes, bool act)
    : spectral{name + ".spectral", width, width, std::move(modes)}, pointwise{name + ".pointwise", width, width},
      activate(act) {}

void FourierBlock::init(ParamStore& store, Rng& rng) const {
  spectral.init(store, rng);
  pointwise.init(store, rng);
}

Var FourierBlock::forward(Graph& g, ParamStore& store, Var x) const {
  Var y = ad::add(spectral.forward(g, store, x), pointwise.forward(g, store, x));
  return activate ? ad::gelu(y) : y;
}

const char* upsample_name(UpsampleMode m) { return m == UpsampleMode::Plain ? "plain" : "meta"; }

UpsampleMode parse_upsample(const std::string& s) {
  if (s == "plain") return UpsampleMode::Plain;
  if (s == "meta") return UpsampleMode::Meta;
  throw std::invalid_argument("unknown upsample mode '" + s + "'");
}

void Upsampler::init(ParamStore& store) const {
  if (mode == UpsampleMode::Meta) store.add(name + ".logits", ad::Tensor({3}, 0.0));
}

Var Upsampler::forward(Graph& g, ParamStore& store, Var x, std::size_t out_h, std::size_t out_w) const {
  if (mode == UpsampleMode::Plain) return ad::interpolate(x, out_h, out_w, grid::ResampleMode::Bicubic, boundary);
  Var w = ad::softmax(p(g, store, name + ".logits"), 0);
  std::vector<Var> branches;
  for (grid::ResampleMode m : {grid::ResampleMode::Nearest, grid::ResampleMode::Bilinear, grid::ResampleMode::Bicubic})
    branches.push_back(ad::interpolate(x, out_h, out_w, m, boundary));
  return ad::weighted_sum(branches, w);
}

std::vector<double> Upsampler::mixture(const ParamStore& store) const {
  if (mode == UpsampleMode::Plain) return {};
  const ad::Tensor& l = store.at(name + ".logits").value;
  const double mx = std::max({l[0], l[1], l[2]});
  std::vector<double> w(3);
  double sum = 0.0;
  for (std::size_t k = 0; k < 3; ++k) sum += (w[k] = std::exp(l[k] - mx));
  for (double& v : w) v /= sum;
  return w;
}

void MultiscaleReconstruct::init(ParamStore& store, Rng& rng) const {
  for (std::size_t k : kernels) Conv2d{name + ".k" + std::to_string(k), in, branch, k}.init(store, rng);
  Pointwise{name + ".merge", branch * kernels.size(), out}.init(store, rng);
}

Var MultiscaleReconstruct::forward(Graph& g, ParamStore& store, Var x) const {
  const Shape& s = x.shape();
  std::size_t largest = 0;
  for (std::size_t k : kernels) largest = std::max(largest, k);
  require(s.size() == 4 && s[1] == in, name + ": expected [N, " + std::to_string(in) + ", H, W], got " +
                                           ad::shape_str(s));
  require(s[2] >= largest && s[3] >= largest,
          name + ": grid " + ad::shape_str(s) + " smaller than kernel " + std::to_string(largest));
  std::vector<Var> branches;
  for (std::size_t k : kernels)
    branches.push_back(ad::relu(Conv2d{name + ".k" + std::to_string(k), in, branch, k}.forward(g, store, x)));
  return Pointwise{name + ".merge", branch * kernels.size(), out}.forward(g, store, ad::concat_channels(branches));
}

Var softmax_constraint(Var y_raw, Var a, std::size_t factor) {
  const Shape& ys = y_raw.shape();
  const Shape& as = a.shape();
  require(factor >= 1 && ys.size() >= 2 && ys.size() == as.size(), "softmax_constraint: rank mismatch " +
                                                                         ad::shape_str(ys) + " vs " + ad::shape_str(as));
  for (std::size_t d = 0; d < ys.size(); ++d) {
    const std::size_t expect = d + 2 >= ys.size() ? as[d] * factor : as[d];
    require(ys[d] == expect, "softmax_constraint: " + ad::shape_str(ys) + " is not a " + std::to_string(factor) +
                                 "x refinement of " + ad::shape_str(as));
  }
  Var weights = ad::softmax(ad::patchify(y_raw, factor), ys.size());
  return ad::unpatchify(ad::mul_broadcast_last(weights, ad::scale(a, static_cast<double>(factor * factor))), factor);
}

ad::Tensor with_sobel(const ad::Tensor& x, grid::Boundary boundary) {
  require(x.rank() == 4, "with_sobel: expected [N, C, H, W], got " + ad::shape_str(x.shape()));
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3), plane = h * w;
  ad::Tensor out({n, 3 * c, h, w});
  for (std::size_t b = 0; b < n; ++b) {
    const double* src = x.data() + b * c * plane;
    double* dst = out.data() + b * 3 * c * plane;
    std::copy(src, src + c * plane, dst);
    grid::sobel_planes(c, h, w, boundary, src, dst + c * plane);
  }
  return out;
}

void DoubleConv::init(ParamStore& store, Rng& rng) const {
  for (int i = 0; i < 2; ++i) {
    const std::string l = name + ".conv" + std::to_string(i);
    Conv2d{l, i == 0 ? in : out, out, 3}.init(store, rng);
    store.add(l + ".gamma", ad::Tensor({out}, 1.0));
    store.add(l + ".beta", ad::Tensor({out}, 0.0));
    store.add(l + ".running_mean", ad::Tensor({out}, 0.0), false);
    store.add(l + ".running_var", ad::Tensor({out}, 1.0), false);
  }
}

Var DoubleConv::forward(Graph& g, ParamStore& store, Var x) const {
  for (int i = 0; i < 2; ++i) {
    const std::string l = name + ".conv" + std::to_string(i);
    x = Conv2d{l, i == 0 ? in : out, out, 3}.forward(g, store, x);
    x = ad::batch_norm(x, p(g, store, l + ".gamma"), p(g, store, l + ".beta"), store.at(l + ".running_mean").value,
                       store.at(l + ".running_var").value);
    x = ad::relu(x);
  }
  return x;
}

std::vector<std::size_t> UNet::widths() const { return {base, 2 * base, 4 * base, 8 * base}; }

void UNet::init(ParamStore& store, Rng& rng) const {
  const auto w = widths();
  for (std::size_t l = 0; l < kLevels; ++l)
    DoubleConv{name + ".enc" + std::to_string(l), l == 0 ? in : w[l - 1], w[l]}.init(store, rng);
  DoubleConv{name + ".bottleneck", w[3], w[3]}.init(store, rng);
  std::size_t cur = w[3];
  for (std::size_t l = kLevels; l-- > 0;) {
    const std::string u = name + ".up" + std::to_string(l);
    const double bound = 1.0 / std::sqrt(static_cast<double>(w[l] * 4));
    store.add(u + ".w", uniform({cur, w[l], 2, 2}, bound, rng));
    store.add(u + ".b", uniform({w[l]}, bound, rng));
    const std::size_t next = l > 0 ? w[l - 1] : w[0];
    DoubleConv{name + ".dec" + std::to_string(l), 2 * w[l], next}.init(store, rng);
    cur = next;
  }
  Pointwise{name + ".head", w[0], out}.init(store, rng);
}

Var UNet::forward(Graph& g, ParamStore& store, Var x, Trace* trace) const {
  const Shape& s = x.shape();
  require(s.size() == 4 && s[1] == in, name + ": expected [N, " + std::to_string(in) + ", H, W], got " +
                                           ad::shape_str(s));
  require(s[2] % 16 == 0 && s[3] % 16 == 0 && s[2] > 0 && s[3] > 0,
          name + ": spatial dims must be divisible by 16, got " + ad::shape_str(s));
  const auto w = widths();
  std::vector<Var> skips;
  for (std::size_t l = 0; l < kLevels; ++l) {
    if (l > 0) x = ad::max_pool2x2(x);
    x = DoubleConv{name + ".enc" + std::to_string(l), l == 0 ? in : w[l - 1], w[l]}.forward(g, store, x);
    skips.push_back(x);
    if (trace) trace->skips.push_back(x.shape());
  }
  x = DoubleConv{name + ".bottleneck", w[3], w[3]}.forward(g, store, ad::max_pool2x2(x));
  if (trace) trace->bottleneck = x.shape();
  for (std::size_t l = kLevels; l-- > 0;) {
    const std::string u = name + ".up" + std::to_string(l);
    x = ad::conv_transpose2d(x, p(g, store, u + ".w"), p(g, store, u + ".b"));
    x = ad::concat_channels({skips[l], x});
    if (trace) trace->merged.push_back(x.shape());
    x = DoubleConv{name + ".dec" + std::to_string(l), 2 * w[l], l > 0 ? w[l - 1] : w[0]}.forward(g, store, x);
  }
  return Pointwise{name + ".head", w[0], out}.forward(g, store, x);
}

}  // namespace arbires::nn
