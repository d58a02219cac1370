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

#include <functional>

#include "tpgn/tensor.hpp"

namespace tpgn {

using ScalarFn = std::function<Tensor(const Tensor&)>;

// Compares reverse-mode gradients of a scalar function against central
// differences (f(x + h e_i) - f(x - h e_i)) / 2h. Returns the largest
// |fd - ad| / max(1, |fd|, |ad|) over all coordinates of x.
double finite_diff_check(const ScalarFn& f, const Tensor& x, double h = 1e-4);

}  // namespace tpgn
