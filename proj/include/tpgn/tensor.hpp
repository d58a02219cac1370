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
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tpgn {

using Shape = std::vector<std::size_t>;
using NodeId = std::size_t;

class Graph;

// Product of the dimensions; 1 for the empty (scalar) shape.
std::size_t element_count(const Shape& shape);
std::string to_string(const Shape& shape);

// Allocation statistics for tensor storage. Benchmarks read the peak to report
// memory without depending on the process RSS.
struct MemoryStats {
  std::size_t live_bytes = 0;
  std::size_t peak_bytes = 0;
};
MemoryStats memory_stats();
// Sets the peak to the current live byte count.
void reset_peak_bytes();

// Multiply-accumulate operations executed by the dense kernels since the last
// reset. Only counts work actually performed (e.g. skipped zero padding is not
// counted).
std::uint64_t mac_count();
void reset_mac_count();
void add_macs(std::uint64_t n);

// Dense row-major array of doubles. Tensors are values: copies share storage
// and mutable_values() detaches (copy-on-write) before handing out a span.
// A tensor produced by an operation on graph-tracked inputs carries the id of
// the recording node.
class Tensor {
 public:
  Tensor();
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor scalar(double value);
  static Tensor from(std::initializer_list<double> values);
  static Tensor zeros(Shape shape) { return Tensor(std::move(shape), 0.0); }
  static Tensor ones(Shape shape) { return Tensor(std::move(shape), 1.0); }
  static Tensor zeros_like(const Tensor& t) { return zeros(t.shape()); }
  static Tensor ones_like(const Tensor& t) { return ones(t.shape()); }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const noexcept;

  std::span<const double> values() const noexcept;
  std::span<double> mutable_values();
  std::vector<double> to_vector() const;

  double operator[](std::size_t flat) const { return values()[flat]; }
  double at(std::initializer_list<std::size_t> index) const;
  // Value of a single-element tensor.
  double item() const;

  bool all_finite() const noexcept;

  bool tracked() const noexcept { return node_.has_value(); }
  std::optional<NodeId> node_id() const noexcept { return node_; }
  Graph* graph() const noexcept { return graph_; }
  // Same storage, no graph link.
  Tensor detach() const;
  // Untracked view of the same storage under another shape.
  Tensor reshaped(Shape shape) const;

 private:
  friend class Graph;
  struct Storage;

  Shape shape_;
  std::shared_ptr<Storage> storage_;
  Graph* graph_ = nullptr;
  std::optional<NodeId> node_;
};

// Exact element-wise equality of shape and values.
bool bitwise_equal(const Tensor& a, const Tensor& b);
double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace tpgn
