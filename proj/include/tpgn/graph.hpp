// Copyright 2026 The TPGN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tpgn/tensor.hpp"

namespace tpgn {

enum class OpKind {
  kLeaf,
  kMatMul,
  kAffine,
  kWindowLinear,
  kAdd,
  kSub,
  kMul,
  kSigmoid,
  kTanh,
  kConcat,
  kPadFront,
  kSum,
  kMean,
  kReshape,
  kPermute,
  kSlice,
  kBroadcast,
};

std::string_view op_name(OpKind kind);

// Gradients keyed by node id. Every leaf of the graph has an entry (zeros when
// the root does not depend on it).
class GradientMap {
 public:
  const Tensor& of(const Tensor& tracked) const;
  const Tensor& of(NodeId id) const;
  bool contains(NodeId id) const { return grads_.count(id) != 0; }
  std::size_t size() const { return grads_.size(); }

 private:
  friend class Graph;
  std::unordered_map<NodeId, Tensor> grads_;
};

// Append-only tape of primitive operations (define-by-run). Tensors produced
// by recorded operations hold a raw pointer to their graph, so a Graph must
// outlive every tracked tensor that is still used in computations.
class Graph {
 public:
  // Gradient of the node output w.r.t. each input, given the upstream
  // gradient. Entries for inputs with needs[i] == false may be left empty.
  using BackwardFn =
      std::function<std::vector<Tensor>(const Tensor& grad_out, const std::vector<bool>& needs)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Registers `value` as a differentiable leaf.
  Tensor leaf(const Tensor& value);

  // Records an operation over `inputs` (tracked or not) producing `value`.
  Tensor record(OpKind kind, std::span<const Tensor* const> inputs, Tensor value,
                BackwardFn backward);

  std::size_t size() const noexcept { return nodes_.size(); }
  OpKind kind(NodeId id) const { return nodes_.at(id).kind; }
  // Tracked parents only, in input order.
  std::vector<NodeId> parents(NodeId id) const;

  // d root / d node for every node that contributes to root; entries are
  // accumulated in decreasing node order, so repeated calls are bitwise equal.
  GradientMap backward(const Tensor& root) const;

  // Largest number of operation nodes on any path from `source` to `sink`,
  // counting `sink` but not `source`. Empty when sink does not depend on source.
  std::optional<std::size_t> longest_path(NodeId source, NodeId sink) const;

  void reset() { nodes_.clear(); }

 private:
  struct Node {
    OpKind kind;
    std::vector<std::optional<NodeId>> inputs;
    Shape shape;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
};

// Returns the graph shared by the tracked tensors among `inputs`, or nullptr.
// Throws ContractError when inputs live on different graphs.
Graph* common_graph(std::span<const Tensor* const> inputs);

}  // namespace tpgn
