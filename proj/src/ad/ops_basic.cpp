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

#include <cmath>
#include <numbers>

#include "ops_internal.hpp"

namespace arbires::ad {

using detail::needs;
using detail::require;
using detail::require_same_shape;

Var add(Var a, Var b) {
  require_same_shape("add", a, b);
  require(a.is_complex() == b.is_complex(), "add: cannot mix real and complex operands");
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.graph().make("add", {a, b}, std::move(out), a.is_complex(), [ia, ib](Graph& g, const Tensor& go) {
    g.accumulate(ia, go);
    g.accumulate(ib, go);
  });
}

Var sub(Var a, Var b) {
  require_same_shape("sub", a, b);
  require(a.is_complex() == b.is_complex(), "sub: cannot mix real and complex operands");
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.graph().make("sub", {a, b}, std::move(out), a.is_complex(), [ia, ib](Graph& g, const Tensor& go) {
    g.accumulate(ia, go);
    if (g.requires_grad(ib)) {
      Tensor& slot = g.grad_slot(ib);
      for (std::size_t i = 0; i < go.size(); ++i) slot[i] -= go[i];
    }
  });
}

Var mul(Var a, Var b) {
  require_same_shape("mul", a, b);
  require(!a.is_complex() && !b.is_complex(), "mul: real operands only (use complex_mul)");
  Tensor out(a.shape());
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.graph().make("mul", {a, b}, std::move(out), false, [ia, ib](Graph& g, const Tensor& go) {
    const Tensor& av = g.node(ia).value;
    const Tensor& bv = g.node(ib).value;
    if (g.requires_grad(ia)) {
      Tensor& s = g.grad_slot(ia);
      for (std::size_t i = 0; i < go.size(); ++i) s[i] += go[i] * bv[i];
    }
    if (g.requires_grad(ib)) {
      Tensor& s = g.grad_slot(ib);
      for (std::size_t i = 0; i < go.size(); ++i) s[i] += go[i] * av[i];
    }
  });
}

Var scale(Var a, double s) {
  Tensor out = a.value();
  for (double& v : out.storage()) v *= s;
  const std::size_t ia = a.id();
  return a.graph().make("scale", {a}, std::move(out), a.is_complex(), [ia, s](Graph& g, const Tensor& go) {
    Tensor& slot = g.grad_slot(ia);
    for (std::size_t i = 0; i < go.size(); ++i) slot[i] += s * go[i];
  });
}

Var relu(Var x) {
  require(!x.is_complex(), "relu: real input required");
  Tensor out = x.value();
  for (double& v : out.storage()) v = v > 0.0 ? v : 0.0;
  const std::size_t ix = x.id();
  return x.graph().make("relu", {x}, std::move(out), false, [ix](Graph& g, const Tensor& go) {
    const Tensor& xv = g.node(ix).value;
    Tensor& slot = g.grad_slot(ix);
    for (std::size_t i = 0; i < go.size(); ++i)
      if (xv[i] > 0.0) slot[i] += go[i];
  });
}

Var gelu(Var x) {
  require(!x.is_complex(), "gelu: real input required");
  Tensor out = x.value();
  for (double& v : out.storage()) v = 0.5 * v * (1.0 + std::erf(v * std::numbers::sqrt2 * 0.5));
  const std::size_t ix = x.id();
  return x.graph().make("gelu", {x}, std::move(out), false, [ix](Graph& g, const Tensor& go) {
    const Tensor& xv = g.node(ix).value;
    Tensor& slot = g.grad_slot(ix);
    const double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
    for (std::size_t i = 0; i < go.size(); ++i) {
      const double v = xv[i];
      const double cdf = 0.5 * (1.0 + std::erf(v * std::numbers::sqrt2 * 0.5));
      const double pdf = inv_sqrt_2pi * std::exp(-0.5 * v * v);
      slot[i] += go[i] * (cdf + v * pdf);
    }
  });
}

Var reshape(Var x, Shape shape) {
  Tensor out = x.value().reshaped(std::move(shape));
  const std::size_t ix = x.id();
  return x.graph().make("reshape", {x}, std::move(out), x.is_complex(), [ix](Graph& g, const Tensor& go) {
    Tensor& slot = g.grad_slot(ix);
    for (std::size_t i = 0; i < go.size(); ++i) slot[i] += go[i];
  });
}

Var as_real(Var x) {
  const std::size_t ix = x.id();
  return x.graph().make("as_real", {x}, x.value(), false, [ix](Graph& g, const Tensor& go) { g.accumulate(ix, go); });
}

Var concat_channels(const std::vector<Var>& xs) {
  require(!xs.empty(), "concat_channels: no inputs");
  const Shape& s0 = xs[0].shape();
  require(s0.size() >= 2, "concat_channels: rank >= 2 required, got " + shape_str(s0));
  std::size_t inner = 1;
  for (std::size_t a = 2; a < s0.size(); ++a) inner *= s0[a];
  std::size_t channels = 0;
  for (const Var& v : xs) {
    const Shape& s = v.shape();
    bool ok = s.size() == s0.size() && s[0] == s0[0] && v.is_complex() == xs[0].is_complex();
    for (std::size_t a = 2; ok && a < s.size(); ++a) ok = s[a] == s0[a];
    if (!ok) throw AdError("concat_channels: shape mismatch " + shape_str(s0) + " vs " + shape_str(s));
    channels += s[1];
  }
  Shape out_shape = s0;
  out_shape[1] = channels;
  Tensor out(out_shape);
  const std::size_t batch = s0[0];
  std::vector<std::size_t> offsets, ids, widths;
  std::size_t off = 0;
  for (const Var& v : xs) {
    const std::size_t c = v.shape()[1];
    const Tensor& val = v.value();
    for (std::size_t n = 0; n < batch; ++n) {
      std::copy(val.data() + n * c * inner, val.data() + (n + 1) * c * inner,
                out.data() + (n * channels + off) * inner);
    }
    offsets.push_back(off);
    ids.push_back(v.id());
    widths.push_back(c);
    off += c;
  }
  return xs[0].graph().make(
      "concat", xs, std::move(out), xs[0].is_complex(),
      [offsets, ids, widths, batch, channels, inner](Graph& g, const Tensor& go) {
        for (std::size_t k = 0; k < ids.size(); ++k) {
          if (!g.requires_grad(ids[k])) continue;
          Tensor& slot = g.grad_slot(ids[k]);
          const std::size_t c = widths[k];
          for (std::size_t n = 0; n < batch; ++n) {
            const double* src = go.data() + (n * channels + offsets[k]) * inner;
            double* dst = slot.data() + n * c * inner;
            for (std::size_t i = 0; i < c * inner; ++i) dst[i] += src[i];
          }
        }
      });
}

Var add_channel_bias(Var x, Var b) {
  const Shape& s = x.shape();
  require(s.size() >= 2 && !x.is_complex(), "add_channel_bias: real [N, C, ...] input required, got " + shape_str(s));
  require(b.value().size() == s[1],
          "add_channel_bias: bias " + shape_str(b.shape()) + " does not match channels of " + shape_str(s));
  std::size_t inner = 1;
  for (std::size_t a = 2; a < s.size(); ++a) inner *= s[a];
  Tensor out = x.value();
  const Tensor& bv = b.value();
  for (std::size_t n = 0; n < s[0]; ++n)
    for (std::size_t c = 0; c < s[1]; ++c) {
      double* p = out.data() + (n * s[1] + c) * inner;
      for (std::size_t i = 0; i < inner; ++i) p[i] += bv[c];
    }
  const std::size_t ix = x.id(), ib = b.id();
  const std::size_t batch = s[0], channels = s[1];
  return x.graph().make("add_channel_bias", {x, b}, std::move(out), false,
                        [ix, ib, batch, channels, inner](Graph& g, const Tensor& go) {
                          g.accumulate(ix, go);
                          if (!g.requires_grad(ib)) return;
                          Tensor& slot = g.grad_slot(ib);
                          for (std::size_t n = 0; n < batch; ++n)
                            for (std::size_t c = 0; c < channels; ++c) {
                              const double* p = go.data() + (n * channels + c) * inner;
                              double acc = 0.0;
                              for (std::size_t i = 0; i < inner; ++i) acc += p[i];
                              slot[c] += acc;
                            }
                        });
}

Var mean(Var x) {
  require(!x.is_complex(), "mean: real input required");
  const Tensor& v = x.value();
  double acc = 0.0;
  for (double e : v.values()) acc += e;
  const double n = static_cast<double>(v.size());
  const std::size_t ix = x.id();
  return x.graph().make("mean", {x}, Tensor(Shape{1}, acc / n), false, [ix, n](Graph& g, const Tensor& go) {
    Tensor& slot = g.grad_slot(ix);
    const double s = go[0] / n;
    for (double& e : slot.storage()) e += s;
  });
}

Var mean_abs(Var x) {
  require(!x.is_complex(), "mean_abs: real input required");
  const Tensor& v = x.value();
  double acc = 0.0;
  for (double e : v.values()) acc += std::abs(e);
  const double n = static_cast<double>(v.size());
  const std::size_t ix = x.id();
  return x.graph().make("mean_abs", {x}, Tensor(Shape{1}, acc / n), false, [ix, n](Graph& g, const Tensor& go) {
    const Tensor& xv = g.node(ix).value;
    Tensor& slot = g.grad_slot(ix);
    const double s = go[0] / n;
    for (std::size_t i = 0; i < xv.size(); ++i) slot[i] += xv[i] > 0.0 ? s : (xv[i] < 0.0 ? -s : 0.0);
  });
}

Var mean_square(Var x) {
  require(!x.is_complex(), "mean_square: real input required");
  const Tensor& v = x.value();
  double acc = 0.0;
  for (double e : v.values()) acc += e * e;
  const double n = static_cast<double>(v.size());
  const std::size_t ix = x.id();
  return x.graph().make("mean_square", {x}, Tensor(Shape{1}, acc / n), false, [ix, n](Graph& g, const Tensor& go) {
    const Tensor& xv = g.node(ix).value;
    Tensor& slot = g.grad_slot(ix);
    const double s = 2.0 * go[0] / n;
    for (std::size_t i = 0; i < xv.size(); ++i) slot[i] += s * xv[i];
  });
}

Var weighted_sum(const std::vector<Var>& xs, Var w) {
  require(!xs.empty(), "weighted_sum: no inputs");
  require(w.value().size() == xs.size(), "weighted_sum: " + std::to_string(xs.size()) + " inputs but weights " +
                                             shape_str(w.shape()));
  for (const Var& x : xs) require_same_shape("weighted_sum", xs[0], x);
  Tensor out(xs[0].shape(), 0.0);
  const Tensor& wv = w.value();
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const Tensor& xv = xs[k].value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += wv[k] * xv[i];
  }
  std::vector<Var> parents = xs;
  parents.push_back(w);
  std::vector<std::size_t> ids;
  for (const Var& x : xs) ids.push_back(x.id());
  const std::size_t iw = w.id();
  return w.graph().make("weighted_sum", parents, std::move(out), xs[0].is_complex(),
                        [ids, iw](Graph& g, const Tensor& go) {
                          const Tensor& wv = g.node(iw).value;
                          for (std::size_t k = 0; k < ids.size(); ++k) {
                            if (g.requires_grad(ids[k])) {
                              Tensor& s = g.grad_slot(ids[k]);
                              for (std::size_t i = 0; i < go.size(); ++i) s[i] += wv[k] * go[i];
                            }
                            if (g.requires_grad(iw)) {
                              const Tensor& xv = g.node(ids[k]).value;
                              double acc = 0.0;
                              for (std::size_t i = 0; i < go.size(); ++i) acc += go[i] * xv[i];
                              g.grad_slot(iw)[k] += acc;
                            }
                          }
                        });
}

Var softmax(Var x, std::size_t axis) {
  const Shape& s = x.shape();
  require(!x.is_complex() && axis < s.size(), "softmax: bad axis " + std::to_string(axis) + " for " + shape_str(s));
  std::size_t outer = 1, inner = 1;
  for (std::size_t a = 0; a < axis; ++a) outer *= s[a];
  for (std::size_t a = axis + 1; a < s.size(); ++a) inner *= s[a];
  const std::size_t len = s[axis];
  Tensor out(s);
  const Tensor& xv = x.value();
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t i = 0; i < inner; ++i) {
      const std::size_t base = o * len * inner + i;
      double mx = xv[base];
      for (std::size_t k = 1; k < len; ++k) mx = std::max(mx, xv[base + k * inner]);
      double sum = 0.0;
      for (std::size_t k = 0; k < len; ++k) {
        const double e = std::exp(xv[base + k * inner] - mx);
        out[base + k * inner] = e;
        sum += e;
      }
      for (std::size_t k = 0; k < len; ++k) out[base + k * inner] /= sum;
    }
  const std::size_t ix = x.id();
  const std::size_t iy = x.graph().next_id();
  return x.graph().make("softmax", {x}, std::move(out), false,
                        [ix, iy, outer, inner, len](Graph& g, const Tensor& go) {
                          const Tensor& y = g.node(iy).value;
                          Tensor& slot = g.grad_slot(ix);
                          for (std::size_t o = 0; o < outer; ++o)
                            for (std::size_t i = 0; i < inner; ++i) {
                              const std::size_t base = o * len * inner + i;
                              double dotp = 0.0;
                              for (std::size_t k = 0; k < len; ++k) dotp += go[base + k * inner] * y[base + k * inner];
                              for (std::size_t k = 0; k < len; ++k) {
                                const std::size_t idx = base + k * inner;
                                slot[idx] += y[idx] * (go[idx] - dotp);
                              }
                            }
                        });
}

}  // namespace arbires::ad
