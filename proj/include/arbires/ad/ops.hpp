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

// Differentiable primitives. Tensors are batched: [N, C, H, W] for planar
// data and [N, C, T, H, W] for spatio-temporal data. Complex values use a
// trailing (re, im) axis and real-composite gradients, i.e. real and
// imaginary parts are independent real inputs.

#include <cstddef>
#include <string>
#include <vector>

#include "arbires/ad/graph.hpp"
#include "arbires/grid/resample.hpp"

namespace arbires::ad {

// --- elementwise -----------------------------------------------------------
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
Var relu(Var x);
/// Exact GELU, 0.5 x (1 + erf(x / sqrt 2)).
Var gelu(Var x);

// --- shape -------------------------------------------------------------------
Var reshape(Var x, Shape shape);
/// Views a complex tensor as its real (re, im) storage.
Var as_real(Var x);
/// Concatenates along axis 1 (channels).
Var concat_channels(const std::vector<Var>& xs);
/// Adds b[C] along axis 1 of x[N, C, ...].
Var add_channel_bias(Var x, Var b);

// --- reductions / losses -----------------------------------------------------
Var mean(Var x);
/// mean |x|; subgradient 0 at 0.
Var mean_abs(Var x);
/// mean x^2.
Var mean_square(Var x);
/// sum_k w[k] * xs[k] with w a tensor of K scalars.
Var weighted_sum(const std::vector<Var>& xs, Var w);

// --- convolution family ------------------------------------------------------
/// Channel matmul over x[N, Cin, S...] with w[Cout, Cin] and b[Cout].
Var conv1x1(Var x, Var w, Var b);
/// x[N, Cin, H, W], w[Cout, Cin, K, K], b[Cout]; zero padding.
Var conv2d(Var x, Var w, Var b, std::size_t stride, std::size_t pad);
/// x[N, Cin, T, H, W], w[Cout, Cin, Kt, Kh, Kw], b[Cout]; zero padding per axis.
Var conv3d(Var x, Var w, Var b, std::size_t stride, std::size_t pad_t, std::size_t pad_s);
/// Non-overlapping transposed convolution (kernel == stride).
/// x[N, Cin, H, W], w[Cin, Cout, K, K], b[Cout] -> [N, Cout, K H, K W].
Var conv_transpose2d(Var x, Var w, Var b);
Var max_pool2x2(Var x);

/// Batch normalisation over every axis but 1. In training graphs batch
/// statistics are used and the running buffers updated with `momentum`;
/// otherwise the running buffers normalise.
Var batch_norm(Var x, Var gamma, Var beta, Tensor& running_mean, Tensor& running_var, double momentum = 0.1,
               double eps = 1e-5);

Var softmax(Var x, std::size_t axis);

// --- spectral ----------------------------------------------------------------
/// Real FFT over the trailing `rank` (2 or 3) axes; complex output.
Var rfft(Var x, std::size_t rank);
/// Inverse of rfft; `dims` are the real lengths of the trailing axes.
Var irfft(Var x, const Shape& dims);
Var complex_from_parts(Var re, Var im);
Var complex_mul(Var a, Var b);
/// Keeps the low-frequency block of a half spectrum. `modes` lists the kept
/// count per transformed axis (leading axes keep 2m bins, the halved last
/// axis keeps m).
Var mode_truncate(Var x, const Shape& modes);
/// Zero-fills a truncated block back to a half spectrum of real dims `dims`.
Var mode_pad(Var x, const Shape& dims);
/// Complex channel mixing per mode: x[N, Cin, M...] with w[M..., Cin, Cout].
Var spectral_mix(Var x, Var w);

// --- resampling --------------------------------------------------------------
/// Interpolates the trailing two axes to (out_h, out_w).
Var interpolate(Var x, std::size_t out_h, std::size_t out_w, grid::ResampleMode mode, grid::Boundary boundary);
/// Block mean of the trailing two axes.
Var avg_pool(Var x, std::size_t factor);
/// [..., H, W] -> [..., H/f, W/f, f*f]
Var patchify(Var x, std::size_t factor);
/// [..., h, w, f*f] -> [..., h f, w f]
Var unpatchify(Var x, std::size_t factor);
/// Appends zero rows and columns after the trailing two axes.
Var pad_end(Var x, std::size_t rows, std::size_t cols);
/// Keeps the leading (h, w) block of the trailing two axes.
Var crop(Var x, std::size_t h, std::size_t w);
/// p[..., K] * a[...] broadcast over the last axis.
Var mul_broadcast_last(Var p, Var a);

}  // namespace arbires::ad
