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
#include <limits>

#include "arbires/simd/kernels.hpp"
#include "ops_internal.hpp"

namespace arbires::ad {

using detail::require;

namespace {

struct ConvGeom {
  std::size_t cin, t, h, w;     // input
  std::size_t kt, kh, kw;       // kernel
  std::size_t stride;
  std::size_t pt, ph, pw;       // zero padding
  std::size_t to, ho, wo;       // output

  std::size_t k() const { return cin * kt * kh * kw; }
  std::size_t p() const { return to * ho * wo; }
  std::size_t in_plane() const { return cin * t * h * w; }
};

ConvGeom make_geom(std::size_t cin, std::size_t t, std::size_t h, std::size_t w, std::size_t kt, std::size_t kh,
                   std::size_t kw, std::size_t stride, std::size_t pt, std::size_t ph, std::size_t pw) {
  ConvGeom g{cin, t, h, w, kt, kh, kw, stride, pt, ph, pw, 0, 0, 0};
  require(stride >= 1, "conv: stride must be >= 1");
  require(t + 2 * pt >= kt && h + 2 * ph >= kh && w + 2 * pw >= kw, "conv: kernel larger than padded input");
  g.to = (t + 2 * pt - kt) / stride + 1;
  g.ho = (h + 2 * ph - kh) / stride + 1;
  g.wo = (w + 2 * pw - kw) / stride + 1;
  return g;
}

// cols[(c, dt, dy, dx), (ot, oy, ox)]
void im2col(const ConvGeom& g, const double* x, double* cols) {
  const std::size_t P = g.p();
  std::size_t row = 0;
  for (std::size_t c = 0; c < g.cin; ++c)
    for (std::size_t dt = 0; dt < g.kt; ++dt)
      for (std::size_t dy = 0; dy < g.kh; ++dy)
        for (std::size_t dx = 0; dx < g.kw; ++dx, ++row) {
          double* dst = cols + row * P;
          for (std::size_t ot = 0; ot < g.to; ++ot) {
            const long it = static_cast<long>(ot * g.stride + dt) - static_cast<long>(g.pt);
            for (std::size_t oy = 0; oy < g.ho; ++oy) {
              const long iy = static_cast<long>(oy * g.stride + dy) - static_cast<long>(g.ph);
              double* d = dst + (ot * g.ho + oy) * g.wo;
              if (it < 0 || it >= static_cast<long>(g.t) || iy < 0 || iy >= static_cast<long>(g.h)) {
                for (std::size_t ox = 0; ox < g.wo; ++ox) d[ox] = 0.0;
                continue;
              }
              const double* src = x + ((c * g.t + static_cast<std::size_t>(it)) * g.h + static_cast<std::size_t>(iy)) * g.w;
              for (std::size_t ox = 0; ox < g.wo; ++ox) {
                const long ix = static_cast<long>(ox * g.stride + dx) - static_cast<long>(g.pw);
                d[ox] = (ix < 0 || ix >= static_cast<long>(g.w)) ? 0.0 : src[ix];
              }
            }
          }
        }
}

void col2im(const ConvGeom& g, const double* cols, double* x) {
  const std::size_t P = g.p();
  std::size_t row = 0;
  for (std::size_t c = 0; c < g.cin; ++c)
    for (std::size_t dt = 0; dt < g.kt; ++dt)
      for (std::size_t dy = 0; dy < g.kh; ++dy)
        for (std::size_t dx = 0; dx < g.kw; ++dx, ++row) {
          const double* srcrow = cols + row * P;
          for (std::size_t ot = 0; ot < g.to; ++ot) {
            const long it = static_cast<long>(ot * g.stride + dt) - static_cast<long>(g.pt);
            if (it < 0 || it >= static_cast<long>(g.t)) continue;
            for (std::size_t oy = 0; oy < g.ho; ++oy) {
              const long iy = static_cast<long>(oy * g.stride + dy) - static_cast<long>(g.ph);
              if (iy < 0 || iy >= static_cast<long>(g.h)) continue;
              const double* s = srcrow + (ot * g.ho + oy) * g.wo;
              double* dst = x + ((c * g.t + static_cast<std::size_t>(it)) * g.h + static_cast<std::size_t>(iy)) * g.w;
              for (std::size_t ox = 0; ox < g.wo; ++ox) {
                const long ix = static_cast<long>(ox * g.stride + dx) - static_cast<long>(g.pw);
                if (ix >= 0 && ix < static_cast<long>(g.w)) dst[ix] += s[ox];
              }
            }
          }
        }
}

Var conv_generic(const char* name, Var x, Var w, Var b, const ConvGeom& geom, std::size_t batch, Shape out_shape) {
  const std::size_t cout = w.shape()[0];
  require(b.value().size() == cout, std::string(name) + ": bias " + shape_str(b.shape()) + " does not match " +
                                        std::to_string(cout) + " output channels");
  const std::size_t K = geom.k(), P = geom.p();
  Tensor out(std::move(out_shape));
  std::vector<double> cols(K * P);
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  const Tensor& bv = b.value();
  for (std::size_t n = 0; n < batch; ++n) {
    const double* xn = xv.data() + n * geom.in_plane();
    double* on = out.data() + n * cout * P;
    if (geom.kt * geom.kh * geom.kw == 1 && geom.stride == 1 && geom.pt + geom.ph + geom.pw == 0) {
      simd::gemm(false, false, cout, P, K, wv.data(), xn, 0.0, on);
    } else {
      im2col(geom, xn, cols.data());
      simd::gemm(false, false, cout, P, K, wv.data(), cols.data(), 0.0, on);
    }
    for (std::size_t o = 0; o < cout; ++o)
      for (std::size_t p = 0; p < P; ++p) on[o * P + p] += bv[o];
  }
  const std::size_t ix = x.id(), iw = w.id(), ib = b.id();
  return x.graph().make(name, {x, w, b}, std::move(out), false,
                        [geom, batch, cout, ix, iw, ib](Graph& g, const Tensor& go) {
                          const std::size_t K = geom.k(), P = geom.p();
                          const bool direct = geom.kt * geom.kh * geom.kw == 1 && geom.stride == 1 &&
                                              geom.pt + geom.ph + geom.pw == 0;
                          const Tensor& xv = g.node(ix).value;
                          const Tensor& wv = g.node(iw).value;
                          const bool gx = g.requires_grad(ix), gw = g.requires_grad(iw), gb = g.requires_grad(ib);
                          std::vector<double> cols(direct ? 0 : K * P), gcols(K * P);
                          for (std::size_t n = 0; n < batch; ++n) {
                            const double* gon = go.data() + n * cout * P;
                            const double* xn = xv.data() + n * geom.in_plane();
                            if (gb) {
                              Tensor& s = g.grad_slot(ib);
                              for (std::size_t o = 0; o < cout; ++o) {
                                double acc = 0.0;
                                for (std::size_t p = 0; p < P; ++p) acc += gon[o * P + p];
                                s[o] += acc;
                              }
                            }
                            if (gw) {
                              const double* c = xn;
                              if (!direct) {
                                im2col(geom, xn, cols.data());
                                c = cols.data();
                              }
                              simd::gemm(false, true, cout, K, P, gon, c, 1.0, g.grad_slot(iw).data());
                            }
                            if (gx) {
                              double* gxn = g.grad_slot(ix).data() + n * geom.in_plane();
                              if (direct) {
                                simd::gemm(true, false, K, P, cout, wv.data(), gon, 1.0, gxn);
                              } else {
                                simd::gemm(true, false, K, P, cout, wv.data(), gon, 0.0, gcols.data());
                                col2im(geom, gcols.data(), gxn);
                              }
                            }
                          }
                        });
}

}  // namespace

Var conv1x1(Var x, Var w, Var b) {
  const Shape& s = x.shape();
  require(!x.is_complex() && s.size() >= 2, "conv1x1: real [N, C, ...] input required, got " + shape_str(s));
  require(w.shape().size() == 2 && w.shape()[1] == s[1],
          "conv1x1: weight " + shape_str(w.shape()) + " does not match input " + shape_str(s));
  std::size_t spatial = 1;
  for (std::size_t a = 2; a < s.size(); ++a) spatial *= s[a];
  ConvGeom geom{s[1], 1, 1, spatial, 1, 1, 1, 1, 0, 0, 0, 1, 1, spatial};
  Shape out_shape = s;
  out_shape[1] = w.shape()[0];
  return conv_generic("conv1x1", x, w, b, geom, s[0], std::move(out_shape));
}

Var conv2d(Var x, Var w, Var b, std::size_t stride, std::size_t pad) {
  const Shape& s = x.shape();
  const Shape& ws = w.shape();
  require(!x.is_complex() && s.size() == 4, "conv2d: input must be [N, C, H, W], got " + shape_str(s));
  require(ws.size() == 4 && ws[1] == s[1], "conv2d: weight " + shape_str(ws) + " does not match input " + shape_str(s));
  const ConvGeom geom = make_geom(s[1], 1, s[2], s[3], 1, ws[2], ws[3], stride, 0, pad, pad);
  return conv_generic("conv2d", x, w, b, geom, s[0], Shape{s[0], ws[0], geom.ho, geom.wo});
}

Var conv3d(Var x, Var w, Var b, std::size_t stride, std::size_t pad_t, std::size_t pad_s) {
  const Shape& s = x.shape();
  const Shape& ws = w.shape();
  require(!x.is_complex() && s.size() == 5, "conv3d: input must be [N, C, T, H, W], got " + shape_str(s));
  require(ws.size() == 5 && ws[1] == s[1], "conv3d: weight " + shape_str(ws) + " does not match input " + shape_str(s));
  const ConvGeom geom = make_geom(s[1], s[2], s[3], s[4], ws[2], ws[3], ws[4], stride, pad_t, pad_s, pad_s);
  return conv_generic("conv3d", x, w, b, geom, s[0], Shape{s[0], ws[0], geom.to, geom.ho, geom.wo});
}

Var conv_transpose2d(Var x, Var w, Var b) {
  const Shape& s = x.shape();
  const Shape& ws = w.shape();
  require(!x.is_complex() && s.size() == 4, "conv_transpose2d: input must be [N, C, H, W], got " + shape_str(s));
  require(ws.size() == 4 && ws[0] == s[1] && ws[2] == ws[3],
          "conv_transpose2d: weight " + shape_str(ws) + " does not match input " + shape_str(s));
  const std::size_t batch = s[0], cin = s[1], h = s[2], wd = s[3], cout = ws[1], k = ws[2];
  require(b.value().size() == cout, "conv_transpose2d: bias " + shape_str(b.shape()) + " does not match weight " +
                                        shape_str(ws));
  const std::size_t P = h * wd, R = cout * k * k, H2 = h * k, W2 = wd * k;
  Tensor out(Shape{batch, cout, H2, W2});
  std::vector<double> y(R * P);
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  const Tensor& bv = b.value();
  for (std::size_t n = 0; n < batch; ++n) {
    simd::gemm(true, false, R, P, cin, wv.data(), xv.data() + n * cin * P, 0.0, y.data());
    double* on = out.data() + n * cout * H2 * W2;
    for (std::size_t o = 0; o < cout; ++o)
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t c = 0; c < k; ++c) {
          const double* yr = y.data() + ((o * k + a) * k + c) * P;
          for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < wd; ++j) on[(o * H2 + i * k + a) * W2 + j * k + c] = yr[i * wd + j] + bv[o];
        }
  }
  const std::size_t ix = x.id(), iw = w.id(), ib = b.id();
  return x.graph().make(
      "conv_transpose2d", {x, w, b}, std::move(out), false,
      [=](Graph& g, const Tensor& go) {
        std::vector<double> gy(R * P);
        const Tensor& xv = g.node(ix).value;
        const Tensor& wv = g.node(iw).value;
        for (std::size_t n = 0; n < batch; ++n) {
          const double* gon = go.data() + n * cout * H2 * W2;
          for (std::size_t o = 0; o < cout; ++o)
            for (std::size_t a = 0; a < k; ++a)
              for (std::size_t c = 0; c < k; ++c) {
                double* yr = gy.data() + ((o * k + a) * k + c) * P;
                for (std::size_t i = 0; i < h; ++i)
                  for (std::size_t j = 0; j < wd; ++j) yr[i * wd + j] = gon[(o * H2 + i * k + a) * W2 + j * k + c];
              }
          if (g.requires_grad(ib)) {
            Tensor& s = g.grad_slot(ib);
            for (std::size_t o = 0; o < cout; ++o) {
              double acc = 0.0;
              for (std::size_t r = o * k * k; r < (o + 1) * k * k; ++r)
                for (std::size_t p = 0; p < P; ++p) acc += gy[r * P + p];
              s[o] += acc;
            }
          }
          if (g.requires_grad(ix)) {
            simd::gemm(false, false, cin, P, R, wv.data(), gy.data(), 1.0, g.grad_slot(ix).data() + n * cin * P);
          }
          if (g.requires_grad(iw)) {
            simd::gemm(false, true, cin, R, P, xv.data() + n * cin * P, gy.data(), 1.0, g.grad_slot(iw).data());
          }
        }
      });
}

Var max_pool2x2(Var x) {
  const Shape& s = x.shape();
  require(!x.is_complex() && s.size() >= 2, "max_pool2x2: real input with >= 2 axes required");
  const std::size_t h = s[s.size() - 2], w = s[s.size() - 1];
  require(h % 2 == 0 && w % 2 == 0, "max_pool2x2: spatial dims must be even, got " + shape_str(s));
  const std::size_t planes = shape_numel(s) / (h * w);
  Shape os = s;
  os[s.size() - 2] = h / 2;
  os[s.size() - 1] = w / 2;
  Tensor out(os);
  std::vector<std::size_t> arg(out.size());
  const Tensor& xv = x.value();
  for (std::size_t p = 0; p < planes; ++p)
    for (std::size_t i = 0; i < h / 2; ++i)
      for (std::size_t j = 0; j < w / 2; ++j) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t bi = 0;
        for (std::size_t a = 0; a < 2; ++a)
          for (std::size_t c = 0; c < 2; ++c) {
            const std::size_t idx = p * h * w + (2 * i + a) * w + 2 * j + c;
            if (xv[idx] > best) {
              best = xv[idx];
              bi = idx;
            }
          }
        const std::size_t o = p * (h / 2) * (w / 2) + i * (w / 2) + j;
        out[o] = best;
        arg[o] = bi;
      }
  const std::size_t ix = x.id();
  return x.graph().make("max_pool2x2", {x}, std::move(out), false, [ix, arg](Graph& g, const Tensor& go) {
    Tensor& slot = g.grad_slot(ix);
    for (std::size_t o = 0; o < go.size(); ++o) slot[arg[o]] += go[o];
  });
}

Var batch_norm(Var x, Var gamma, Var beta, Tensor& running_mean, Tensor& running_var, double momentum, double eps) {
  const Shape& s = x.shape();
  require(!x.is_complex() && s.size() >= 2, "batch_norm: real [N, C, ...] input required, got " + shape_str(s));
  const std::size_t batch = s[0], channels = s[1];
  require(gamma.value().size() == channels && beta.value().size() == channels &&
              running_mean.size() == channels && running_var.size() == channels,
          "batch_norm: parameter size does not match channels of " + shape_str(s));
  std::size_t inner = 1;
  for (std::size_t a = 2; a < s.size(); ++a) inner *= s[a];
  const double count = static_cast<double>(batch * inner);
  Graph& graph = x.graph();
  const bool training = graph.training();
  const Tensor& xv = x.value();
  std::vector<double> mu(channels), inv_std(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    if (training) {
      double m = 0.0;
      for (std::size_t n = 0; n < batch; ++n)
        for (std::size_t i = 0; i < inner; ++i) m += xv[(n * channels + c) * inner + i];
      m /= count;
      double v = 0.0;
      for (std::size_t n = 0; n < batch; ++n)
        for (std::size_t i = 0; i < inner; ++i) {
          const double d = xv[(n * channels + c) * inner + i] - m;
          v += d * d;
        }
      v /= count;
      mu[c] = m;
      inv_std[c] = 1.0 / std::sqrt(v + eps);
      const double unbiased = count > 1.0 ? v * count / (count - 1.0) : v;
      running_mean[c] = (1.0 - momentum) * running_mean[c] + momentum * m;
      running_var[c] = (1.0 - momentum) * running_var[c] + momentum * unbiased;
    } else {
      mu[c] = running_mean[c];
      inv_std[c] = 1.0 / std::sqrt(running_var[c] + eps);
    }
  }
  Tensor out(s);
  const Tensor& gv = gamma.value();
  const Tensor& bv = beta.value();
  for (std::size_t n = 0; n < batch; ++n)
    for (std::size_t c = 0; c < channels; ++c)
      for (std::size_t i = 0; i < inner; ++i) {
        const std::size_t idx = (n * channels + c) * inner + i;
        out[idx] = gv[c] * (xv[idx] - mu[c]) * inv_std[c] + bv[c];
      }
  const std::size_t ix = x.id(), ig = gamma.id(), ib = beta.id();
  return graph.make(
      "batch_norm", {x, gamma, beta}, std::move(out), false,
      [=](Graph& g, const Tensor& go) {
        const Tensor& xv = g.node(ix).value;
        const Tensor& gv = g.node(ig).value;
        for (std::size_t c = 0; c < channels; ++c) {
          double sum_g = 0.0, sum_gx = 0.0;
          for (std::size_t n = 0; n < batch; ++n)
            for (std::size_t i = 0; i < inner; ++i) {
              const std::size_t idx = (n * channels + c) * inner + i;
              const double xhat = (xv[idx] - mu[c]) * inv_std[c];
              sum_g += go[idx];
              sum_gx += go[idx] * xhat;
            }
          if (g.requires_grad(ig)) g.grad_slot(ig)[c] += sum_gx;
          if (g.requires_grad(ib)) g.grad_slot(ib)[c] += sum_g;
          if (!g.requires_grad(ix)) continue;
          Tensor& slot = g.grad_slot(ix);
          const double k = gv[c] * inv_std[c];
          for (std::size_t n = 0; n < batch; ++n)
            for (std::size_t i = 0; i < inner; ++i) {
              const std::size_t idx = (n * channels + c) * inner + i;
              if (training) {
                const double xhat = (xv[idx] - mu[c]) * inv_std[c];
                slot[idx] += k * (go[idx] - sum_g / count - xhat * sum_gx / count);
              } else {
                slot[idx] += k * go[idx];
              }
            }
        }
      });
}

}  // namespace arbires::ad
