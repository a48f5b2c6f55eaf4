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

// Parameterised building blocks. Each layer is a small immutable description
// (names, sizes); parameters live in a ParamStore under "<name>.<field>".
// init() registers them, forward() binds them into a graph.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "arbires/ad/graph.hpp"
#include "arbires/ad/ops.hpp"
#include "arbires/grid/resample.hpp"

namespace arbires::nn {

using ad::Graph;
using ad::ParamStore;
using ad::Shape;
using ad::Var;
using Rng = std::mt19937_64;

/// U(-bound, bound) tensor.
ad::Tensor uniform(Shape shape, double bound, Rng& rng);

/// Channel map over x[N, Cin, S...].
struct Pointwise {
  std::string name;
  std::size_t in = 0, out = 0;

  void init(ParamStore& store, Rng& rng) const;
  void zero(ParamStore& store) const;
  Var forward(Graph& g, ParamStore& store, Var x) const;
};

/// Same-padded 2D convolution with odd kernel.
struct Conv2d {
  std::string name;
  std::size_t in = 0, out = 0, kernel = 3;

  void init(ParamStore& store, Rng& rng) const;
  Var forward(Graph& g, ParamStore& store, Var x) const;
};

/// Truncated Fourier multiplier over the trailing modes.size() axes
/// (2 for [N, C, H, W], 3 for [N, C, T, H, W]).
struct SpectralConv {
  std::string name;
  std::size_t in = 0, out = 0;
  Shape modes;

  Shape weight_shape() const;
  void init(ParamStore& store, Rng& rng) const;
  Var forward(Graph& g, ParamStore& store, Var x) const;
};

/// act(spectral(x) + W x + b) with GELU activation.
struct FourierBlock {
  SpectralConv spectral;
  Pointwise pointwise;
  bool activate = true;

  FourierBlock() = default;
  FourierBlock(const std::string& name, std::size_t width, Shape modes, bool activate = true);
  void init(ParamStore& store, Rng& rng) const;
  Var forward(Graph& g, ParamStore& store, Var x) const;
};

enum class UpsampleMode { Plain, Meta };

const char* upsample_name(UpsampleMode m);
UpsampleMode parse_upsample(const std::string& s);

/// Bicubic (plain) or a learned softmax mixture of nearest, bilinear and
/// bicubic interpolation (meta) onto the requested grid.
struct Upsampler {
  std::string name;
  UpsampleMode mode = UpsampleMode::Plain;
  grid::Boundary boundary = grid::Boundary::Periodic;

  void init(ParamStore& store) const;
  Var forward(Graph& g, ParamStore& store, Var x, std::size_t out_h, std::size_t out_w) const;
  /// softmax(logits); empty in plain mode.
  std::vector<double> mixture(const ParamStore& store) const;
};

/// Parallel same-padded conv branches merged by a 1x1 conv.
struct MultiscaleReconstruct {
  std::string name;
  std::size_t in = 0, branch = 0, out = 0;
  std::vector<std::size_t> kernels{3, 5, 7};

  void init(ParamStore& store, Rng& rng) const;
  Var forward(Graph& g, ParamStore& store, Var x) const;
};

/// Redistributes each coarse value a_i over its factor x factor patch of
/// y_raw with softmax weights scaled by factor^2, so avg_pool(y, factor) == a.
Var softmax_constraint(Var y_raw, Var a, std::size_t factor);

/// Sobel gradients of every [H, W] plane of x[N, C, H, W] appended as
/// channels: [x, d/dx x, d/dy x] -> [N, 3C, H, W]. Not differentiated.
ad::Tensor with_sobel(const ad::Tensor& x, grid::Boundary boundary);

/// conv3x3 -> batch norm -> ReLU, twice.
struct DoubleConv {
  std::string name;
  std::size_t in = 0, out = 0;

  void init(ParamStore& store, Rng& rng) const;
  Var forward(Graph& g, ParamStore& store, Var x) const;
};

/// Four-level U-Net: widths base, 2b, 4b, 8b with an 8b bottleneck after the
/// fourth pooling; transposed-conv upsampling with skip concatenation.
struct UNet {
  std::string name;
  std::size_t in = 0, out = 0, base = 64;

  static constexpr std::size_t kLevels = 4;
  /// Shapes seen on the way through, for inspection.
  struct Trace {
    std::vector<Shape> skips;
    Shape bottleneck;
    std::vector<Shape> merged;
  };

  std::vector<std::size_t> widths() const;
  void init(ParamStore& store, Rng& rng) const;
  Var forward(Graph& g, ParamStore& store, Var x, Trace* trace = nullptr) const;
};

}  // namespace arbires::nn
