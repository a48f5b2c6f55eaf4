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

#include <algorithm>
#include <span>

#include "arbires/grid/fft.hpp"
#include "arbires/simd/kernels.hpp"
#include "ops_internal.hpp"

namespace arbires::ad {

using detail::require;
using detail::require_same_shape;

namespace {

// Real length of the trailing `rank` axes of a real tensor.
Shape trailing(const Shape& s, std::size_t rank) { return Shape(s.end() - static_cast<long>(rank), s.end()); }

// Half-spectrum complex shape for the given leading shape and real dims.
Shape half_shape(const Shape& lead, const Shape& dims) {
  Shape out = lead;
  for (std::size_t a = 0; a + 1 < dims.size(); ++a) out.push_back(dims[a]);
  out.push_back(dims.back() / 2 + 1);
  out.push_back(2);
  return out;
}

// Scales each half-spectrum bin by f(column multiplicity).
template <class F>
void scale_columns(cplx* z, std::size_t count, std::size_t last_dim, F f) {
  const std::size_t wh = last_dim / 2 + 1;
  for (std::size_t i = 0; i < count; ++i) z[i] *= f(grid::fft::column_multiplicity(i % wh, last_dim));
}

// Offsets within one half-spectrum plane of the truncated block, in
// truncated row-major order.
std::vector<std::size_t> kept_offsets(const Shape& half_dims, const Shape& modes) {
  const std::size_t rank = modes.size();
  std::vector<std::vector<std::size_t>> axis(rank);
  for (std::size_t a = 0; a < rank; ++a) {
    const std::size_t d = half_dims[a], m = modes[a];
    if (a + 1 < rank) {
      for (std::size_t k = 0; k < m; ++k) axis[a].push_back(k);
      for (std::size_t k = d - m; k < d; ++k) axis[a].push_back(k);
    } else {
      for (std::size_t k = 0; k < m; ++k) axis[a].push_back(k);
    }
  }
  std::vector<std::size_t> out{0};
  for (std::size_t a = 0; a < rank; ++a) {
    std::vector<std::size_t> next;
    next.reserve(out.size() * axis[a].size());
    for (std::size_t base : out)
      for (std::size_t k : axis[a]) next.push_back(base * half_dims[a] + k);
    out = std::move(next);
  }
  return out;
}

}  // namespace

Var rfft(Var x, std::size_t rank) {
  const Shape& s = x.shape();
  require(!x.is_complex(), "rfft: real input required");
  require((rank == 2 || rank == 3) && s.size() >= rank, "rfft: rank must be 2 or 3 and fit shape " + shape_str(s));
  const Shape dims = trailing(s, rank);
  const Shape lead(s.begin(), s.end() - static_cast<long>(rank));
  const std::size_t batch = shape_numel(lead);
  Tensor out(half_shape(lead, dims));
  grid::fft::rfft(dims, batch, x.value().data(), out.complex_data());
  const std::size_t ix = x.id();
  return x.graph().make("rfft", {x}, std::move(out), true, [ix, dims, batch](Graph& g, const Tensor& go) {
    const std::size_t nh = grid::fft::half_size(dims), nr = grid::fft::real_size(dims);
    std::vector<cplx> z(go.complex_data(), go.complex_data() + batch * nh);
    const double n = static_cast<double>(nr);
    scale_columns(z.data(), z.size(), dims.back(), [n](double c) { return n / c; });
    std::vector<double> r(batch * nr);
    grid::fft::irfft(dims, batch, z.data(), r.data());
    Tensor& slot = g.grad_slot(ix);
    for (std::size_t i = 0; i < r.size(); ++i) slot[i] += r[i];
  });
}

Var irfft(Var x, const Shape& dims) {
  const Shape& s = x.shape();
  const std::size_t rank = dims.size();
  require(x.is_complex(), "irfft: complex input required");
  require((rank == 2 || rank == 3) && s.size() >= rank + 1, "irfft: bad rank for shape " + shape_str(s));
  const Shape lead(s.begin(), s.end() - static_cast<long>(rank + 1));
  require(half_shape(lead, dims) == s, "irfft: spectrum " + shape_str(s) + " does not match real dims " +
                                           shape_str(dims));
  const std::size_t batch = shape_numel(lead);
  Shape os = lead;
  os.insert(os.end(), dims.begin(), dims.end());
  Tensor out(os);
  grid::fft::irfft(dims, batch, x.value().complex_data(), out.data());
  const std::size_t ix = x.id();
  return x.graph().make("irfft", {x}, std::move(out), false, [ix, dims, batch](Graph& g, const Tensor& go) {
    const std::size_t nh = grid::fft::half_size(dims), nr = grid::fft::real_size(dims);
    std::vector<cplx> z(batch * nh);
    grid::fft::rfft(dims, batch, go.data(), z.data());
    const double n = static_cast<double>(nr);
    scale_columns(z.data(), z.size(), dims.back(), [n](double c) { return c / n; });
    Tensor& slot = g.grad_slot(ix);
    const double* zd = reinterpret_cast<const double*>(z.data());
    for (std::size_t i = 0; i < 2 * z.size(); ++i) slot[i] += zd[i];
  });
}

Var complex_from_parts(Var re, Var im) {
  require_same_shape("complex_from_parts", re, im);
  require(!re.is_complex() && !im.is_complex(), "complex_from_parts: real parts required");
  Shape s = re.shape();
  s.push_back(2);
  Tensor out(s);
  const Tensor& rv = re.value();
  const Tensor& iv = im.value();
  for (std::size_t i = 0; i < rv.size(); ++i) {
    out[2 * i] = rv[i];
    out[2 * i + 1] = iv[i];
  }
  const std::size_t ir = re.id(), ii = im.id();
  return re.graph().make("complex_from_parts", {re, im}, std::move(out), true, [ir, ii](Graph& g, const Tensor& go) {
    const std::size_t n = go.size() / 2;
    if (g.requires_grad(ir)) {
      Tensor& s = g.grad_slot(ir);
      for (std::size_t i = 0; i < n; ++i) s[i] += go[2 * i];
    }
    if (g.requires_grad(ii)) {
      Tensor& s = g.grad_slot(ii);
      for (std::size_t i = 0; i < n; ++i) s[i] += go[2 * i + 1];
    }
  });
}

Var complex_mul(Var a, Var b) {
  require_same_shape("complex_mul", a, b);
  require(a.is_complex() && b.is_complex(), "complex_mul: complex operands required");
  Tensor out(a.shape());
  const std::size_t n = out.size() / 2;
  const cplx* av = a.value().complex_data();
  const cplx* bv = b.value().complex_data();
  cplx* o = out.complex_data();
  for (std::size_t i = 0; i < n; ++i) o[i] = av[i] * bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.graph().make("complex_mul", {a, b}, std::move(out), true, [ia, ib, n](Graph& g, const Tensor& go) {
    const cplx* gv = go.complex_data();
    const cplx* av = g.node(ia).value.complex_data();
    const cplx* bv = g.node(ib).value.complex_data();
    if (g.requires_grad(ia)) {
      cplx* s = g.grad_slot(ia).complex_data();
      for (std::size_t i = 0; i < n; ++i) s[i] += std::conj(bv[i]) * gv[i];
    }
    if (g.requires_grad(ib)) {
      cplx* s = g.grad_slot(ib).complex_data();
      for (std::size_t i = 0; i < n; ++i) s[i] += std::conj(av[i]) * gv[i];
    }
  });
}

Var mode_truncate(Var x, const Shape& modes) {
  const Shape& s = x.shape();
  const std::size_t rank = modes.size();
  require(x.is_complex() && s.size() >= rank + 1 && rank >= 1, "mode_truncate: complex spectrum required, got " +
                                                                   shape_str(s));
  const Shape half_dims(s.end() - static_cast<long>(rank + 1), s.end() - 1);
  for (std::size_t a = 0; a < rank; ++a) {
    const std::size_t need = a + 1 < rank ? 2 * modes[a] : modes[a];
    require(modes[a] >= 1 && need <= half_dims[a],
            "mode_truncate: " + std::to_string(modes[a]) + " modes exceed axis of size " +
                std::to_string(half_dims[a]) + " in " + shape_str(s));
  }
  const std::vector<std::size_t> kept = kept_offsets(half_dims, modes);
  const std::size_t plane = shape_numel(half_dims);
  const std::size_t batch = (x.value().size() / 2) / plane;
  Shape os(s.begin(), s.end() - static_cast<long>(rank + 1));
  for (std::size_t a = 0; a < rank; ++a) os.push_back(a + 1 < rank ? 2 * modes[a] : modes[a]);
  os.push_back(2);
  Tensor out(os);
  const cplx* xv = x.value().complex_data();
  cplx* o = out.complex_data();
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t k = 0; k < kept.size(); ++k) o[b * kept.size() + k] = xv[b * plane + kept[k]];
  const std::size_t ix = x.id();
  return x.graph().make("mode_truncate", {x}, std::move(out), true,
                        [ix, kept, plane, batch](Graph& g, const Tensor& go) {
                          cplx* s = g.grad_slot(ix).complex_data();
                          const cplx* gv = go.complex_data();
                          for (std::size_t b = 0; b < batch; ++b)
                            for (std::size_t k = 0; k < kept.size(); ++k)
                              s[b * plane + kept[k]] += gv[b * kept.size() + k];
                        });
}

Var mode_pad(Var x, const Shape& dims) {
  const Shape& s = x.shape();
  const std::size_t rank = dims.size();
  require(x.is_complex() && s.size() >= rank + 1 && rank >= 1, "mode_pad: complex block required, got " +
                                                                   shape_str(s));
  const Shape block(s.end() - static_cast<long>(rank + 1), s.end() - 1);
  Shape modes(rank), half_dims(dims);
  half_dims.back() = dims.back() / 2 + 1;
  for (std::size_t a = 0; a < rank; ++a) {
    if (a + 1 < rank) {
      require(block[a] % 2 == 0, "mode_pad: leading block axes must hold 2m bins, got " + shape_str(s));
      modes[a] = block[a] / 2;
    } else {
      modes[a] = block[a];
    }
    const std::size_t need = a + 1 < rank ? 2 * modes[a] : modes[a];
    require(need <= half_dims[a], "mode_pad: block " + shape_str(s) + " does not fit real dims " + shape_str(dims));
  }
  const std::vector<std::size_t> kept = kept_offsets(half_dims, modes);
  const std::size_t plane = shape_numel(half_dims);
  const std::size_t batch = (x.value().size() / 2) / kept.size();
  Shape os(s.begin(), s.end() - static_cast<long>(rank + 1));
  os.insert(os.end(), half_dims.begin(), half_dims.end());
  os.push_back(2);
  Tensor out(os);
  const cplx* xv = x.value().complex_data();
  cplx* o = out.complex_data();
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t k = 0; k < kept.size(); ++k) o[b * plane + kept[k]] = xv[b * kept.size() + k];
  const std::size_t ix = x.id();
  return x.graph().make("mode_pad", {x}, std::move(out), true, [ix, kept, plane, batch](Graph& g, const Tensor& go) {
    cplx* s = g.grad_slot(ix).complex_data();
    const cplx* gv = go.complex_data();
    for (std::size_t b = 0; b < batch; ++b)
      for (std::size_t k = 0; k < kept.size(); ++k) s[b * kept.size() + k] += gv[b * plane + kept[k]];
  });
}

Var spectral_mix(Var x, Var w) {
  const Shape& xs = x.shape();
  const Shape& ws = w.shape();
  require(x.is_complex() && w.is_complex(), "spectral_mix: complex operands required");
  require(xs.size() >= 4 && ws.size() == xs.size(), "spectral_mix: input " + shape_str(xs) +
                                                        " and weight " + shape_str(ws) + " ranks do not conform");
  const std::size_t nm = xs.size() - 3;  // number of mode axes
  for (std::size_t a = 0; a < nm; ++a)
    require(xs[2 + a] == ws[a], "spectral_mix: mode block of input " + shape_str(xs) + " does not match weight " +
                                    shape_str(ws));
  require(ws[nm] == xs[1], "spectral_mix: input channels of " + shape_str(xs) + " do not match weight " +
                               shape_str(ws));
  const std::size_t batch = xs[0], cin = xs[1], cout = ws[nm + 1];
  std::size_t modes = 1;
  for (std::size_t a = 0; a < nm; ++a) modes *= ws[a];
  Shape os = xs;
  os[1] = cout;
  Tensor out(os);
  const simd::KernelTable& k = simd::active();
  const cplx* xv = x.value().complex_data();
  const cplx* wv = w.value().complex_data();
  cplx* o = out.complex_data();
  std::vector<cplx> acc(cout);
  for (std::size_t n = 0; n < batch; ++n)
    for (std::size_t p = 0; p < modes; ++p) {
      std::fill(acc.begin(), acc.end(), cplx{});
      for (std::size_t i = 0; i < cin; ++i)
        k.caxpy(cout, xv[(n * cin + i) * modes + p], wv + (p * cin + i) * cout, acc.data());
      for (std::size_t c = 0; c < cout; ++c) o[(n * cout + c) * modes + p] = acc[c];
    }
  const std::size_t ix = x.id(), iw = w.id();
  return x.graph().make(
      "spectral_mix", {x, w}, std::move(out), true, [=](Graph& g, const Tensor& go) {
        const simd::KernelTable& k = simd::active();
        const cplx* xv = g.node(ix).value.complex_data();
        const cplx* wv = g.node(iw).value.complex_data();
        const cplx* gv = go.complex_data();
        const bool gx = g.requires_grad(ix), gw = g.requires_grad(iw);
        cplx* sx = gx ? g.grad_slot(ix).complex_data() : nullptr;
        cplx* sw = gw ? g.grad_slot(iw).complex_data() : nullptr;
        std::vector<cplx> gout(cout);
        for (std::size_t n = 0; n < batch; ++n)
          for (std::size_t p = 0; p < modes; ++p) {
            for (std::size_t c = 0; c < cout; ++c) gout[c] = gv[(n * cout + c) * modes + p];
            for (std::size_t i = 0; i < cin; ++i) {
              const cplx* wrow = wv + (p * cin + i) * cout;
              if (gx) sx[(n * cin + i) * modes + p] += k.cdotc(cout, wrow, gout.data());
              if (gw) k.caxpy(cout, std::conj(xv[(n * cin + i) * modes + p]), gout.data(), sw + (p * cin + i) * cout);
            }
          }
      });
}

}  // namespace arbires::ad
