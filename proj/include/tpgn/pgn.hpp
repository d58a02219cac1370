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
#include <string>

#include "tpgn/random.hpp"
#include "tpgn/tensor.hpp"

namespace tpgn {

// Weights of one PGN layer.
//
//   H    = window_linear(x, w_hist, b_hist)      history of the L-1 past steps
//   G    = sigmoid(w_gate [x_t, H_t] + b_gate)
//   Hhat = tanh(w_cand [x_t, H_t] + b_cand)
//   Out  = G * H + (1 - G) * Hhat
//
// The history window is ordered oldest step first and flattened step-major
// (channels within a step). The gate input concatenates x_t before H_t.
struct PgnParams {
  std::size_t seq_len = 0;
  std::size_t in_channels = 0;
  std::size_t hidden = 0;
  Tensor w_hist;  // [hidden x (seq_len-1)*in_channels]
  Tensor b_hist;  // [hidden]
  Tensor w_gate;  // [hidden x (hidden+in_channels)]
  Tensor b_gate;
  Tensor w_cand;
  Tensor b_cand;

  // seq_len must be at least 2 (the history window would be empty otherwise).
  static PgnParams init(std::size_t seq_len, std::size_t in_channels, std::size_t hidden,
                        Rng& rng);
  void validate() const;

  template <class Self, class F>
  static void visit(Self& self, const std::string& prefix, F&& f) {
    f(prefix + "w_hist", self.w_hist);
    f(prefix + "b_hist", self.b_hist);
    f(prefix + "w_gate", self.w_gate);
    f(prefix + "b_gate", self.b_gate);
    f(prefix + "w_cand", self.w_cand);
    f(prefix + "b_cand", self.b_cand);
  }
};

struct PgnOutput {
  Tensor hist;    // H
  Tensor gate;    // G
  Tensor cand;    // Hhat
  Tensor out;
};

// x is [L x c] or batched [N x L x c]; outputs have hidden in the last axis.
Tensor hie_forward(const Tensor& x, const PgnParams& params);
PgnOutput pgn_forward(const Tensor& x, const PgnParams& params);

// Reference evaluation: a literal per-step loop over plain arrays that slices
// each zero-padded history explicitly. Shares no code with pgn_forward.
PgnOutput pgn_forward_oracle(const Tensor& x, const PgnParams& params);

// Longest chain of primitive operations between the input and Out in the
// recorded forward graph of a length-params.seq_len sequence.
std::size_t pgn_graph_depth(const PgnParams& params);

}  // namespace tpgn
