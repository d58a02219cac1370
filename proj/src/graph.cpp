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

#include "tpgn/graph.hpp"

#include <algorithm>

#include "tpgn/errors.hpp"

namespace tpgn {

std::string_view op_name(OpKind kind) {
  switch (kind) {
    case OpKind::kLeaf: return "leaf";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kAffine: return "affine";
    case OpKind::kWindowLinear: return "window_linear";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kTanh: return "tanh";
    case OpKind::kConcat: return "concat";
    case OpKind::kPadFront: return "pad_front";
    case OpKind::kSum: return "sum";
    case OpKind::kMean: return "mean";
    case OpKind::kReshape: return "reshape";
    case OpKind::kPermute: return "permute";
    case OpKind::kSlice: return "slice";
    case OpKind::kBroadcast: return "broadcast";
  }
  return "?";
}

const Tensor& GradientMap::of(const Tensor& tracked) const {
  if (!tracked.node_id()) {
    throw ContractError("gradient requested for an untracked tensor");
  }
  return of(*tracked.node_id());
}

const Tensor& GradientMap::of(NodeId id) const {
  auto it = grads_.find(id);
  if (it == grads_.end()) {
    throw ContractError("no gradient recorded for node " + std::to_string(id));
  }
  return it->second;
}

Graph* common_graph(std::span<const Tensor* const> inputs) {
  Graph* g = nullptr;
  for (const Tensor* t : inputs) {
    if (!t->tracked()) continue;
    if (g && t->graph() != g) {
      throw ContractError("operation mixes tensors from different graphs");
    }
    g = t->graph();
  }
  return g;
}

Tensor Graph::leaf(const Tensor& value) {
  Tensor t = value.detach();
  t.graph_ = this;
  t.node_ = nodes_.size();
  nodes_.push_back(Node{OpKind::kLeaf, {}, value.shape(), nullptr});
  return t;
}

Tensor Graph::record(OpKind kind, std::span<const Tensor* const> inputs, Tensor value,
                     BackwardFn backward) {
  Node node{kind, {}, value.shape(), std::move(backward)};
  node.inputs.reserve(inputs.size());
  for (const Tensor* in : inputs) {
    if (in->tracked() && in->graph() != this) {
      throw ContractError("operation mixes tensors from different graphs");
    }
    node.inputs.push_back(in->node_id());
  }
  value.graph_ = this;
  value.node_ = nodes_.size();
  nodes_.push_back(std::move(node));
  return value;
}

std::vector<NodeId> Graph::parents(NodeId id) const {
  std::vector<NodeId> out;
  for (const auto& in : nodes_.at(id).inputs) {
    if (in) out.push_back(*in);
  }
  return out;
}

GradientMap Graph::backward(const Tensor& root) const {
  if (!root.tracked() || root.graph() != this) {
    throw ContractError("backward root must be tracked on this graph");
  }
  if (root.size() != 1) {
    throw ContractError("backward root must be a scalar, got shape " +
                        to_string(root.shape()));
  }
  const NodeId root_id = *root.node_id();
  std::vector<std::optional<Tensor>> grads(root_id + 1);
  grads[root_id] = Tensor::ones(root.shape());

  // Which nodes lie upstream of the root.
  std::vector<bool> reaches(root_id + 1, false);
  reaches[root_id] = true;
  for (NodeId i = root_id + 1; i-- > 0;) {
    if (!reaches[i]) continue;
    for (const auto& in : nodes_[i].inputs) {
      if (in) reaches[*in] = true;
    }
  }

  for (NodeId i = root_id + 1; i-- > 0;) {
    const Node& node = nodes_[i];
    if (node.kind == OpKind::kLeaf || !grads[i]) continue;
    std::vector<bool> needs(node.inputs.size(), false);
    bool any = false;
    for (std::size_t k = 0; k < node.inputs.size(); ++k) {
      needs[k] = node.inputs[k].has_value() && reaches[*node.inputs[k]];
      any = any || needs[k];
    }
    if (any) {
      std::vector<Tensor> in_grads = node.backward(*grads[i], needs);
      for (std::size_t k = 0; k < node.inputs.size(); ++k) {
        if (!needs[k]) continue;
        const NodeId p = *node.inputs[k];
        const Tensor& g = in_grads.at(k);
        if (g.shape() != nodes_[p].shape) {
          throw DimensionError(std::string("backward of ") + std::string(op_name(node.kind)) +
                               " produced gradient " + to_string(g.shape()) +
                               " for input of shape " + to_string(nodes_[p].shape));
        }
        if (grads[p]) {
          auto dst = grads[p]->mutable_values();
          auto src = g.values();
          for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
        } else {
          grads[p] = g;
        }
      }
    }
    // Interior gradients are no longer needed once propagated.
    grads[i].reset();
  }

  GradientMap out;
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].kind != OpKind::kLeaf) continue;
    if (i <= root_id && grads[i]) {
      out.grads_.emplace(i, std::move(*grads[i]));
    } else {
      out.grads_.emplace(i, Tensor::zeros(nodes_[i].shape));
    }
  }
  return out;
}

std::optional<std::size_t> Graph::longest_path(NodeId source, NodeId sink) const {
  if (source >= nodes_.size() || sink >= nodes_.size()) {
    throw ContractError("longest_path node id out of range");
  }
  if (sink < source) return std::nullopt;
  std::vector<std::optional<std::size_t>> dist(sink + 1);
  dist[source] = 0;
  for (NodeId i = source + 1; i <= sink; ++i) {
    for (const auto& in : nodes_[i].inputs) {
      if (!in || *in < source || !dist[*in]) continue;
      const std::size_t d = *dist[*in] + 1;
      if (!dist[i] || d > *dist[i]) dist[i] = d;
    }
  }
  return dist[sink];
}

}  // namespace tpgn
