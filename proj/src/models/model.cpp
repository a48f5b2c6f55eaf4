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

#include "arbires/models/model.hpp"

#include <cmath>
#include <stdexcept>

namespace arbires::models {

using ad::Graph;
using ad::Var;

namespace {

constexpr std::pair<Variant, const char*> kTags[] = {
    {Variant::DFNO, "dfno"},          {Variant::SpecDFNO, "specdfno"},          {Variant::MetaGrad, "metagrad"},
    {Variant::MultiGrad, "multigrad"}, {Variant::TempDFNO, "temp_dfno"},         {Variant::TempSpecDFNO, "temp_specdfno"},
    {Variant::CNN2, "cnn2"},          {Variant::CNN4, "cnn4"},
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw ModelError(msg);
}

}  // namespace

const char* variant_tag(Variant v) {
  for (const auto& [var, tag] : kTags)
    if (var == v) return tag;
  return "?";
}

Variant parse_variant(const std::string& tag) {
  for (const auto& [var, t] : kTags)
    if (tag == t) return var;
  throw ModelError("unknown model variant '" + tag + "'");
}

std::vector<Variant> all_variants() {
  std::vector<Variant> out;
  for (const auto& [var, tag] : kTags) out.push_back(var);
  return out;
}

const char* adapter_name(Adapter a) { return a == Adapter::Structural ? "structural" : "bicubic"; }

Adapter parse_adapter(const std::string& s) {
  if (s == "structural") return Adapter::Structural;
  if (s == "bicubic") return Adapter::Bicubic;
  throw ModelError("unknown adapter '" + s + "'");
}

nn::UpsampleMode ModelSpec::upsample() const {
  return variant == Variant::MetaGrad ? nn::UpsampleMode::Meta : nn::UpsampleMode::Plain;
}

Preprocess ModelSpec::preprocess() const {
  return variant == Variant::MetaGrad || variant == Variant::MultiGrad ? Preprocess::Sobel : Preprocess::None;
}

bool ModelSpec::temporal() const { return variant == Variant::TempDFNO || variant == Variant::TempSpecDFNO; }

bool ModelSpec::residual() const { return variant == Variant::SpecDFNO || variant == Variant::TempSpecDFNO; }

bool ModelSpec::cnn() const { return variant == Variant::CNN2 || variant == Variant::CNN4; }

std::size_t ModelSpec::trained_factor() const {
  if (variant == Variant::CNN2) return 2;
  if (variant == Variant::CNN4) return 4;
  return 0;
}

void ModelSpec::validate() const {
  require(in_channels >= 1 && out_channels >= 1, "model: channel counts must be positive");
  if (cnn()) {
    require(unet_base >= 1, "model: unet_base must be positive");
    require(!constraint, "model: the constraint layer is not wired into the U-Net baselines");
    return;
  }
  require(blocks >= 1 && width >= 1 && modes >= 1 && projection >= 1, "model: operator sizes must be positive");
  require(padding >= 0.0 && padding <= 1.0, "model: padding must lie in [0, 1]");
  if (variant == Variant::MultiGrad) require(branch_width >= 1, "model: branch_width must be positive");
  if (temporal()) {
    require(window >= 1 && modes_t >= 1 && 2 * modes_t <= window,
            "model: modes_t " + std::to_string(modes_t) + " exceeds the Nyquist limit of a " + std::to_string(window) +
                "-frame window");
    require(!constraint, "model: the constraint layer needs a low-resolution counterpart of the output; temporal "
                         "variants predict future frames");
  }
  if (constraint) require(in_channels == out_channels, "model: constraint needs matching input and output channels");
}

nlohmann::json ModelSpec::to_json() const {
  return {
      {"variant", variant_tag(variant)},
      {"in_channels", in_channels},
      {"out_channels", out_channels},
      {"blocks", blocks},
      {"width", width},
      {"modes", modes},
      {"modes_t", modes_t},
      {"projection", projection},
      {"branch_width", branch_width},
      {"constraint", constraint},
      {"padding", padding},
      {"window", window},
      {"unet_base", unet_base},
      {"adapter", adapter_name(adapter)},
      {"boundary", grid::boundary_name(boundary)},
      {"seed", seed},
      {"upsample", nn::upsample_name(upsample())},
      {"preprocess", preprocess() == Preprocess::Sobel ? "sobel" : "none"},
      {"temporal", temporal()},
  };
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
  ModelSpec s;
  try {
    s.variant = parse_variant(j.at("variant").get<std::string>());
    auto opt = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    opt("in_channels", s.in_channels);
    opt("out_channels", s.out_channels);
    opt("blocks", s.blocks);
    opt("width", s.width);
    opt("modes", s.modes);
    opt("modes_t", s.modes_t);
    opt("projection", s.projection);
    opt("branch_width", s.branch_width);
    opt("constraint", s.constraint);
    opt("padding", s.padding);
    opt("window", s.window);
    opt("unet_base", s.unet_base);
    opt("seed", s.seed);
    if (j.contains("adapter")) s.adapter = parse_adapter(j.at("adapter").get<std::string>());
    if (j.contains("boundary")) s.boundary = grid::parse_boundary(j.at("boundary").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("model spec: ") + e.what());
  }
  // Derived wiring is written for readers; it must agree with the tag.
  if (j.contains("upsample"))
    require(j.at("upsample") == nn::upsample_name(s.upsample()), "model spec: upsample mode contradicts the variant");
  if (j.contains("temporal"))
    require(j.at("temporal") == s.temporal(), "model spec: temporal flag contradicts the variant");
  s.validate();
  return s;
}

Model::Model(ModelSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  nn::Rng rng(spec_.seed);
  if (spec_.cnn()) {
    unet_ = nn::UNet{"unet", spec_.in_channels, spec_.out_channels, spec_.unet_base};
    unet_.init(params_, rng);
    return;
  }
  const std::size_t lifted_in = spec_.in_channels * (spec_.preprocess() == Preprocess::Sobel ? 3 : 1);
  const ad::Shape modes = spec_.temporal() ? ad::Shape{spec_.modes_t, spec_.modes, spec_.modes}
                                           : ad::Shape{spec_.modes, spec_.modes};
  lift_ = nn::Pointwise{"lift", lifted_in, spec_.width};
  upsampler_ = nn::Upsampler{"upsample", spec_.upsample(), spec_.boundary};
  for (std::size_t b = 0; b < spec_.blocks; ++b)
    blocks_.emplace_back("block" + std::to_string(b), spec_.width, modes, b + 1 < spec_.blocks);
  lift_.init(params_, rng);
  upsampler_.init(params_);
  for (const auto& blk : blocks_) blk.init(params_, rng);
  if (spec_.variant == Variant::MultiGrad) {
    nn::MultiscaleReconstruct{"reconstruct", spec_.width, spec_.branch_width, spec_.out_channels}.init(params_, rng);
  } else {
    nn::Pointwise{"proj1", spec_.width, spec_.projection}.init(params_, rng);
    nn::Pointwise{"proj2", spec_.projection, spec_.out_channels}.init(params_, rng);
  }
  if (spec_.residual()) {
    const std::string r = kResidualPrefix;
    residual_lift_ = nn::Pointwise{r + ".lift", spec_.width + spec_.out_channels, spec_.width};
    for (std::size_t b = 0; b < spec_.blocks; ++b)
      residual_blocks_.emplace_back(r + ".block" + std::to_string(b), spec_.width, modes, b + 1 < spec_.blocks);
    residual_lift_.init(params_, rng);
    for (const auto& blk : residual_blocks_) blk.init(params_, rng);
    nn::Pointwise{r + ".proj1", spec_.width, spec_.projection}.init(params_, rng);
    const nn::Pointwise last{r + ".proj2", spec_.projection, spec_.out_channels};
    last.init(params_, rng);
    last.zero(params_);
  }
}

void Model::check_input(Var x) const {
  const ad::Shape& s = x.shape();
  if (spec_.temporal()) {
    require(s.size() == 5 && s[1] == spec_.in_channels,
            "model: expected [N, " + std::to_string(spec_.in_channels) + ", T, H, W], got " + ad::shape_str(s));
    require(s[2] == spec_.window, "model: expected a window of " + std::to_string(spec_.window) + " frames, got " +
                                      std::to_string(s[2]));
  } else {
    require(s.size() == 4 && s[1] == spec_.in_channels,
            "model: expected [N, " + std::to_string(spec_.in_channels) + ", H, W], got " + ad::shape_str(s));
  }
}

Var Model::reconstruct(Graph& g, Var h, const std::string& prefix) {
  if (spec_.variant == Variant::MultiGrad && prefix.empty())
    return nn::MultiscaleReconstruct{"reconstruct", spec_.width, spec_.branch_width, spec_.out_channels}.forward(
        g, params_, h);
  h = ad::gelu(nn::Pointwise{prefix + "proj1", spec_.width, spec_.projection}.forward(g, params_, h));
  return nn::Pointwise{prefix + "proj2", spec_.projection, spec_.out_channels}.forward(g, params_, h);
}

Var Model::head(Graph& g, Var lifted, Var raw, std::size_t out_h, std::size_t out_w) {
  const ad::Shape& s = raw.shape();
  const std::size_t h = s[s.size() - 2], w = s[s.size() - 1];
  require(out_h >= h && out_w >= w, "model: target " + std::to_string(out_h) + "x" + std::to_string(out_w) +
                                        " is below the input resolution " + std::to_string(h) + "x" +
                                        std::to_string(w));
  const Var e = upsampler_.forward(g, params_, lifted, out_h, out_w);
  const auto pad_h = static_cast<std::size_t>(std::ceil(spec_.padding * static_cast<double>(out_h)));
  const auto pad_w = static_cast<std::size_t>(std::ceil(spec_.padding * static_cast<double>(out_w)));
  auto stack = [&](const std::vector<nn::FourierBlock>& blocks, Var v) {
    if (pad_h + pad_w > 0) v = ad::pad_end(v, pad_h, pad_w);
    for (const auto& blk : blocks) v = blk.forward(g, params_, v);
    return pad_h + pad_w > 0 ? ad::crop(v, out_h, out_w) : v;
  };
  Var y = reconstruct(g, stack(blocks_, e), "");
  if (spec_.residual()) {
    const Var r = stack(residual_blocks_, residual_lift_.forward(g, params_, ad::concat_channels({e, y})));
    y = ad::add(y, reconstruct(g, r, std::string(kResidualPrefix) + "."));
  }
  if (spec_.constraint) {
    require(out_h % h == 0 && out_w % w == 0 && out_h / h == out_w / w,
            "model: the constraint layer needs an integer refinement factor, got " + std::to_string(h) + "x" +
                std::to_string(w) + " -> " + std::to_string(out_h) + "x" + std::to_string(out_w));
    y = nn::softmax_constraint(y, raw, out_h / h);
  }
  return y;
}

std::vector<Var> Model::forward_multi(Graph& g, Var x, const std::vector<std::pair<std::size_t, std::size_t>>& targets) {
  check_input(x);
  std::vector<Var> out;
  if (spec_.cnn()) {
    for (const auto& [h, w] : targets) out.push_back(unet_forward(g, x, h, w));
    return out;
  }
  Var in = x;
  if (spec_.preprocess() == Preprocess::Sobel) in = g.constant(nn::with_sobel(x.value(), spec_.boundary));
  const Var lifted = lift_.forward(g, params_, in);
  for (const auto& [h, w] : targets) out.push_back(head(g, lifted, x, h, w));
  return out;
}

void Model::set_constraint(bool on) {
  ModelSpec s = spec_;
  s.constraint = on;
  s.validate();
  spec_ = s;
}

Var Model::forward(Graph& g, Var x, std::size_t out_h, std::size_t out_w) {
  return forward_multi(g, x, {{out_h, out_w}}).front();
}

ad::Tensor Model::predict(const ad::Tensor& x, std::size_t out_h, std::size_t out_w) {
  Graph g(false);
  return forward(g, g.constant(x), out_h, out_w).value();
}

Var Model::unet_native(Graph& g, Var x) {
  const std::size_t f = spec_.trained_factor();
  const ad::Shape& s = x.shape();
  Var up = ad::interpolate(x, f * s[2], f * s[3], grid::ResampleMode::Bicubic, spec_.boundary);
  return unet_.forward(g, params_, up);
}

Var Model::unet_forward(Graph& g, Var x, std::size_t out_h, std::size_t out_w) {
  const ad::Shape& s = x.shape();
  const std::size_t tf = spec_.trained_factor();
  const bool integral = out_h % s[2] == 0 && out_w % s[3] == 0 && out_h / s[2] == out_w / s[3];
  const std::size_t f = integral ? out_h / s[2] : 0;
  auto unsupported = [&]() {
    return ModelError(std::string(variant_tag(spec_.variant)) + ": cannot reach a refinement factor of " +
                      (integral ? std::to_string(f) : std::string("non-integer")) + " with the " +
                      adapter_name(spec_.adapter) + " adapter");
  };
  if (f == tf) return unet_native(g, x);
  if (f <= 1) throw unsupported();
  if (f > tf) {
    if (spec_.adapter == Adapter::Bicubic)
      return ad::interpolate(unet_native(g, x), out_h, out_w, grid::ResampleMode::Bicubic, spec_.boundary);
    // Recursion: repeated application must land exactly on f.
    std::size_t reached = 1;
    Var y = x;
    while (reached < f) {
      y = unet_native(g, y);
      reached *= tf;
    }
    if (reached != f) throw unsupported();
    return y;
  }
  if (tf % f != 0) throw unsupported();
  const Var fine = unet_native(g, x);
  if (spec_.adapter == Adapter::Structural) return ad::avg_pool(fine, tf / f);
  const auto rows = grid::make_bicubic_sampling_table(spec_.boundary, fine.dim(2), out_h);
  const auto cols = grid::make_bicubic_sampling_table(spec_.boundary, fine.dim(3), out_w);
  ad::Tensor out({s[0], fine.dim(1), out_h, out_w});
  grid::apply_separable(rows, cols, s[0] * fine.dim(1), fine.value().data(), out.data());
  return g.constant(std::move(out));
}

void Model::zero_head() {
  std::string name = "proj2.w";
  if (spec_.cnn()) name = "unet.head.w";
  if (spec_.variant == Variant::MultiGrad) name = "reconstruct.merge.w";
  params_.at(name).value.fill(0.0);
}

std::vector<double> Model::mixture() const { return upsampler_.mixture(params_); }

}  // namespace arbires::models
