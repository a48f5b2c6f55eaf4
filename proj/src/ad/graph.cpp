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

#include "arbires/ad/graph.hpp"

#include <algorithm>

namespace arbires::ad {

Graph& Var::graph() const {
  if (g_ == nullptr) throw AdError("use of an empty Var");
  return *g_;
}

const Tensor& Var::value() const { return graph().node(id_).value; }

bool Var::is_complex() const { return graph().node(id_).is_complex; }

Var Graph::constant(Tensor value, bool is_complex) {
  Node n;
  n.value = std::move(value);
  n.op = "constant";
  n.is_complex = is_complex;
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

Var Graph::variable(Tensor value, bool is_complex) {
  Node n;
  n.value = std::move(value);
  n.op = "variable";
  n.requires_grad = true;
  n.is_complex = is_complex;
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

Var Graph::param(ParamStore& store, const std::string& name) {
  const auto key = std::make_pair(static_cast<const ParamStore*>(&store), name);
  if (auto it = bound_.find(key); it != bound_.end()) return {this, it->second};
  Param& p = store.at(name);
  Node n;
  n.value = p.value;
  n.op = "param:" + name;
  n.requires_grad = p.trainable;
  nodes_.push_back(std::move(n));
  const std::size_t id = nodes_.size() - 1;
  bound_.emplace(key, id);
  if (p.trainable) bindings_.push_back({&store, name, id});
  return {this, id};
}

Var Graph::make(std::string op, const std::vector<Var>& parents, Tensor value, bool is_complex,
                BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  n.op = std::move(op);
  n.is_complex = is_complex;
  for (const Var& p : parents) {
    if (&p.graph() != this) throw AdError("op '" + n.op + "' mixes nodes from different graphs");
    n.parents.push_back(p.id());
    n.requires_grad = n.requires_grad || nodes_[p.id()].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

Tensor& Graph::grad_slot(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.size() != n.value.size()) n.grad = Tensor(n.value.shape(), 0.0);
  return n.grad;
}

void Graph::accumulate(std::size_t id, const Tensor& g) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  if (g.size() != n.value.size()) {
    throw AdError("gradient shape " + shape_str(g.shape()) + " does not match node '" + n.op + "' shape " +
                  shape_str(n.value.shape()));
  }
  Tensor& slot = grad_slot(id);
  for (std::size_t i = 0; i < g.size(); ++i) slot[i] += g[i];
}

void Graph::backward(Var loss) {
  if (!loss.valid() || &loss.graph() != this) throw AdError("backward: loss does not belong to this graph");
  const Node& ln = nodes_[loss.id()];
  if (ln.value.size() != 1 || ln.is_complex) {
    throw AdError("backward: loss must be a real scalar, got shape " + shape_str(ln.value.shape()));
  }
  for (Node& n : nodes_) n.grad = Tensor();
  grad_slot(loss.id())[0] = 1.0;
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.size() == 0 || !n.backward) continue;
    // The closure grows other nodes' slots but never this one.
    Tensor g = std::move(n.grad);
    n.backward(*this, g);
    nodes_[id].grad = std::move(g);
  }
  for (const Binding& b : bindings_) {
    Param& p = b.store->at(b.name);
    const Node& n = nodes_[b.id];
    p.grad = n.grad.size() == n.value.size() ? n.grad : Tensor(n.value.shape(), 0.0);
    p.has_grad = true;
  }
  backward_done_ = true;
}

const Tensor& Graph::grad(Var v) {
  if (!backward_done_) throw AdError("grad requested before backward()");
  return grad_slot(v.id());
}

}  // namespace arbires::ad
