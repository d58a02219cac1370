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
#include <vector>

#include "tpgn/graph.hpp"
#include "tpgn/tensor.hpp"

// Differentiable primitives. Each function is pure; when any input is
// graph-tracked the result is recorded on that graph.
//
// Broadcasting (add/sub/mul): shapes are aligned at their trailing dimension;
// a missing leading dimension or a dimension of size 1 stretches to match the
// other operand. Anything else is a DimensionError.
namespace tpgn {

enum class Elementwise { kAdd, kSub, kMul };
enum class Activation { kSigmoid, kTanh };
enum class Reduction { kSum, kMean };

// a[m x k] * b[k x n].
Tensor matmul(const Tensor& a, const Tensor& b);

// x[..., k] * weight[n x k]^T + bias[n] -> [..., n].
Tensor affine(const Tensor& x, const Tensor& weight, const Tensor& bias);

// Causal sliding linear map over the second-to-last axis of x[..., L, c].
// Output step t is bias + weight * window_t where window_t holds the `window`
// steps strictly before t, oldest first and flattened step-major, with steps
// before the start of the sequence reading as zero (implicit front padding).
// weight is [d x window*c]; result is [..., L, d].
Tensor window_linear(const Tensor& x, const Tensor& weight, const Tensor& bias,
                     std::size_t window);

Tensor elementwise(Elementwise op, const Tensor& a, const Tensor& b);
inline Tensor add(const Tensor& a, const Tensor& b) { return elementwise(Elementwise::kAdd, a, b); }
inline Tensor sub(const Tensor& a, const Tensor& b) { return elementwise(Elementwise::kSub, a, b); }
inline Tensor mul(const Tensor& a, const Tensor& b) { return elementwise(Elementwise::kMul, a, b); }
// 1 - a.
Tensor one_minus(const Tensor& a);
Tensor scale(const Tensor& a, double factor);

Tensor activation(Activation op, const Tensor& a);
inline Tensor sigmoid(const Tensor& a) { return activation(Activation::kSigmoid, a); }
inline Tensor tanh(const Tensor& a) { return activation(Activation::kTanh, a); }

Tensor concat(std::size_t axis, const std::vector<Tensor>& parts);

// Prepends `count` zero slices along `axis`.
Tensor pad_front(const Tensor& a, std::size_t count, std::size_t axis = 0);

// Reduces `axis` away (the result has rank - 1).
Tensor reduce(Reduction op, const Tensor& a, std::size_t axis);
Tensor sum_all(const Tensor& a);
Tensor mean_all(const Tensor& a);

Tensor reshape(const Tensor& a, Shape shape);
Tensor permute(const Tensor& a, const std::vector<std::size_t>& order);
Tensor slice(const Tensor& a, std::size_t axis, std::size_t start, std::size_t length);
Tensor broadcast_to(const Tensor& a, const Shape& shape);

// mean((pred - target)^2); the target is treated as a constant.
Tensor mse_loss(const Tensor& pred, const Tensor& target);

// Shape that a and b broadcast to; throws DimensionError.
Shape broadcast_shape(const Shape& a, const Shape& b);

}  // namespace tpgn
