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

#include <cmath>

#include "tpgn/random.hpp"
#include "tpgn/tensor.hpp"

namespace tpgn {

// Weights ~ Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)).
inline Tensor init_weight(Shape shape, std::size_t fan_in, Rng& rng) {
  Tensor t(std::move(shape));
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (double& v : t.mutable_values()) v = rng.uniform(-bound, bound);
  return t;
}

inline Tensor init_bias(Shape shape) { return Tensor::zeros(std::move(shape)); }

}  // namespace tpgn
