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
#include <map>
#include <string>

#include "arbires/ad/tensor.hpp"

namespace arbires::ad {

/// A named tensor with its gradient slot and Adam moments.
struct Param {
  Tensor value;
  Tensor grad;
  Tensor m;
  Tensor v;
  std::uint64_t step = 0;
  /// Buffers (batch-norm running statistics) are stored and checkpointed
  /// but never touched by the optimizer.
  bool trainable = true;
  /// Set by Graph::backward for every parameter bound into that graph.
  bool has_grad = false;
};

class ParamStore {
 public:
  Param& add(const std::string& name, Tensor init, bool trainable = true);
  Param& at(const std::string& name);
  const Param& at(const std::string& name) const;
  bool contains(const std::string& name) const { return params_.count(name) != 0; }
  std::size_t size() const { return params_.size(); }

  /// Total number of trainable scalars.
  std::size_t trainable_count() const;

  void clear_grads();

  // Ordered by name, so iteration (and checkpoints) are deterministic.
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::map<std::string, Param> params_;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One bias-corrected Adam update of every trainable parameter. Throws if a
/// trainable parameter has no populated gradient.
void adam_step(ParamStore& store, const AdamConfig& cfg);

}  // namespace arbires::ad
