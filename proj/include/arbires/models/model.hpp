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

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "arbires/ad/graph.hpp"
#include "arbires/grid/resample.hpp"
#include "arbires/nn/layers.hpp"

namespace arbires::models {

enum class Variant { DFNO, SpecDFNO, MetaGrad, MultiGrad, TempDFNO, TempSpecDFNO, CNN2, CNN4 };

const char* variant_tag(Variant v);
Variant parse_variant(const std::string& tag);
std::vector<Variant> all_variants();

enum class Preprocess { None, Sobel };

/// How a U-Net baseline reaches a factor other than the one it was trained
/// for. Structural: a 2x model is applied recursively to its own output, a
/// 4x prediction is average-pooled down. Bicubic: the native prediction is
/// interpolated up or decimated down.
enum class Adapter { Structural, Bicubic };

const char* adapter_name(Adapter a);
Adapter parse_adapter(const std::string& s);

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelSpec {
  Variant variant = Variant::DFNO;
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  // Neural-operator stack.
  std::size_t blocks = 4;
  std::size_t width = 32;
  std::size_t modes = 12;
  /// Temporal modes; a 5-frame axis holds at most 2 (4 bins).
  std::size_t modes_t = 2;
  std::size_t projection = 128;
  std::size_t branch_width = 16;
  bool constraint = false;
  /// Zeros appended to each spatial axis before the Fourier blocks, as a
  /// fraction of the target size; breaks the implied wrap-around of
  /// non-periodic data.
  double padding = 0.0;
  std::size_t window = 5;
  // U-Net baselines.
  std::size_t unet_base = 64;
  Adapter adapter = Adapter::Structural;
  grid::Boundary boundary = grid::Boundary::Periodic;
  std::uint64_t seed = 0;

  nn::UpsampleMode upsample() const;
  Preprocess preprocess() const;
  bool temporal() const;
  bool residual() const;
  bool cnn() const;
  /// Trained refinement factor of a U-Net baseline (2 or 4).
  std::size_t trained_factor() const;

  void validate() const;
  nlohmann::json to_json() const;
  static ModelSpec from_json(const nlohmann::json& j);
};

/// A model of any variant with its parameters. Inputs are normalised
/// tensors: [N, C, H, W], or [N, C, T, H, W] for the temporal variants.
class Model {
 public:
  explicit Model(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  ad::ParamStore& params() { return params_; }
  const ad::ParamStore& params() const { return params_; }

  ad::Var forward(ad::Graph& g, ad::Var x, std::size_t out_h, std::size_t out_w);
  /// One output per target, sharing everything before the upsampling block.
  std::vector<ad::Var> forward_multi(ad::Graph& g, ad::Var x,
                                     const std::vector<std::pair<std::size_t, std::size_t>>& targets);

  /// Inference outside any training graph.
  ad::Tensor predict(const ad::Tensor& x, std::size_t out_h, std::size_t out_w);

  /// Toggles the parameter-free constraint layer, e.g. to apply it only at
  /// evaluation time.
  void set_constraint(bool on);

  /// Zeroes the final reconstruction layer (its bias is kept).
  void zero_head();
  /// Meta-upsampler mixture weights; empty for other variants.
  std::vector<double> mixture() const;
  /// Parameter-name prefix of the residual stack (SpecDFNO variants).
  static constexpr const char* kResidualPrefix = "residual";

 private:
  void check_input(ad::Var x) const;
  ad::Var reconstruct(ad::Graph& g, ad::Var h, const std::string& prefix);
  ad::Var head(ad::Graph& g, ad::Var lifted, ad::Var raw, std::size_t out_h, std::size_t out_w);
  ad::Var unet_native(ad::Graph& g, ad::Var x);
  ad::Var unet_forward(ad::Graph& g, ad::Var x, std::size_t out_h, std::size_t out_w);

  ModelSpec spec_;
  ad::ParamStore params_;
  nn::Pointwise lift_;
  nn::Upsampler upsampler_;
  std::vector<nn::FourierBlock> blocks_;
  nn::Pointwise residual_lift_;
  std::vector<nn::FourierBlock> residual_blocks_;
  nn::UNet unet_;
};

/// Checkpoint = a GRD1 file: a header record carrying the spec and free-form
/// metadata as JSON, then one record per parameter holding its value and,
/// once trained, its Adam moments.
void save_checkpoint(const std::filesystem::path& path, const Model& model, const nlohmann::json& meta = {});
Model load_checkpoint(const std::filesystem::path& path, nlohmann::json* meta = nullptr);

}  // namespace arbires::models
