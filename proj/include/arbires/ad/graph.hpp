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

#include <cstddef>
#include <functional>
#include <deque>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "arbires/ad/param_store.hpp"
#include "arbires/ad/tensor.hpp"

namespace arbires::ad {

class Graph;

/// Handle to a node of a Graph. Cheap to copy; only valid while the graph
/// lives.
class Var {
 public:
  Var() = default;
  Var(Graph* g, std::size_t id) : g_(g), id_(id) {}

  bool valid() const { return g_ != nullptr; }
  Graph& graph() const;
  std::size_t id() const { return id_; }

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t dim(std::size_t axis) const { return value().dim(axis); }
  bool is_complex() const;

 private:
  Graph* g_ = nullptr;
  std::size_t id_ = 0;
};

/// Reverse-mode tape. Nodes are appended in evaluation order, which is a
/// topological order of the DAG, so backward walks the tape once in reverse.
class Graph {
 public:
  /// Receives the node's output gradient; must accumulate into parents via
  /// Graph::accumulate.
  using BackwardFn = std::function<void(Graph&, const Tensor& grad_out)>;

  struct Node {
    Tensor value;
    Tensor grad;
    std::string op;
    std::vector<std::size_t> parents;
    BackwardFn backward;
    bool requires_grad = false;
    bool is_complex = false;
  };

  explicit Graph(bool training = false) : training_(training) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  bool training() const { return training_; }

  Var constant(Tensor value, bool is_complex = false);
  /// Leaf whose gradient is requested.
  Var variable(Tensor value, bool is_complex = false);
  /// Leaf bound to store[name]; repeated calls return the same node.
  Var param(ParamStore& store, const std::string& name);

  /// Appends an op node. `backward` may be empty when no parent needs grad.
  Var make(std::string op, const std::vector<Var>& parents, Tensor value, bool is_complex, BackwardFn backward);

  /// Requires a scalar loss. Populates adjoints of everything reachable and
  /// copies parameter gradients into their store (zero when unreachable).
  void backward(Var loss);
  bool backward_done() const { return backward_done_; }

  /// Gradient of the last backward() with respect to v (zeros if v was not
  /// reached). Throws if backward() has not been run.
  const Tensor& grad(Var v);

  const Node& node(std::size_t id) const { return nodes_.at(id); }
  std::size_t size() const { return nodes_.size(); }
  /// Id the next appended node will receive; lets a closure refer to its
  /// own output.
  std::size_t next_id() const { return nodes_.size(); }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  /// Accumulates g into the adjoint of node id (allocated lazily).
  void accumulate(std::size_t id, const Tensor& g);
  /// Mutable adjoint slot of node id, allocated lazily; for ops that
  /// scatter-add into a parent.
  Tensor& grad_slot(std::size_t id);

 private:
  std::deque<Node> nodes_;
  struct Binding {
    ParamStore* store;
    std::string name;
    std::size_t id;
  };
  std::vector<Binding> bindings_;
  std::map<std::pair<const ParamStore*, std::string>, std::size_t> bound_;
  bool training_ = false;
  bool backward_done_ = false;
};

}  // namespace arbires::ad
