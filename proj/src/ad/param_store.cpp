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

#include "arbires/ad/param_store.hpp"

#include <cmath>

namespace arbires::ad {

Param& ParamStore::add(const std::string& name, Tensor init, bool trainable) {
  if (params_.count(name)) throw AdError("parameter '" + name + "' already exists");
  Param p;
  p.m = Tensor(init.shape(), 0.0);
  p.v = Tensor(init.shape(), 0.0);
  p.value = std::move(init);
  p.trainable = trainable;
  return params_.emplace(name, std::move(p)).first->second;
}

Param& ParamStore::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw AdError("unknown parameter '" + name + "'");
  return it->second;
}

const Param& ParamStore::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw AdError("unknown parameter '" + name + "'");
  return it->second;
}

std::size_t ParamStore::trainable_count() const {
  std::size_t n = 0;
  for (const auto& [name, p] : params_)
    if (p.trainable) n += p.value.size();
  return n;
}

void ParamStore::clear_grads() {
  for (auto& [name, p] : params_) {
    p.grad = Tensor();
    p.has_grad = false;
  }
}

void adam_step(ParamStore& store, const AdamConfig& cfg) {
  for (auto& [name, p] : store) {
    if (p.trainable && !p.has_grad) throw AdError("adam_step: parameter '" + name + "' has no gradient");
  }
  for (auto& [name, p] : store) {
    if (!p.trainable) continue;
    p.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(p.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(p.step));
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      p.m[i] = cfg.beta1 * p.m[i] + (1.0 - cfg.beta1) * g;
      p.v[i] = cfg.beta2 * p.v[i] + (1.0 - cfg.beta2) * g * g;
      const double mhat = p.m[i] / bc1;
      const double vhat = p.v[i] / bc2;
      p.value[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
    p.has_grad = false;
  }
}

}  // namespace arbires::ad
