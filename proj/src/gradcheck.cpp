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

#include "tpgn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "tpgn/errors.hpp"
#include "tpgn/graph.hpp"

namespace tpgn {

double finite_diff_check(const ScalarFn& f, const Tensor& x, double h) {
  if (!(h > 0)) throw ContractError("finite_diff_check: step must be positive");
  Graph graph;
  const Tensor tracked = graph.leaf(x);
  const Tensor root = f(tracked);
  const Tensor analytic = graph.backward(root).of(tracked);

  Tensor probe(x.shape(), x.to_vector());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    probe.mutable_values()[i] = orig + h;
    const double up = f(probe).item();
    probe.mutable_values()[i] = orig - h;
    const double down = f(probe).item();
    probe.mutable_values()[i] = orig;
    const double fd = (up - down) / (2.0 * h);
    const double ad = analytic[i];
    const double err = std::abs(fd - ad) / std::max({1.0, std::abs(fd), std::abs(ad)});
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace tpgn
