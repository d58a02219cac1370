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

// Standard GRU; gate blocks are stacked reset, update, candidate:
//   r = sigmoid(W_ir x + b_ir + W_hr h + b_hr)
//   z = sigmoid(W_iz x + b_iz + W_hz h + b_hz)
//   n = tanh(W_in x + b_in + r * (W_hn h + b_hn))
//   h' = (1 - z) * n + z * h
struct GruParams {
  std::size_t in_channels = 0;
  std::size_t hidden = 0;
  Tensor w_ih;  // [3d x c]
  Tensor b_ih;  // [3d]
  Tensor w_hh;  // [3d x d]
  Tensor b_hh;  // [3d]

  static GruParams init(std::size_t in_channels, std::size_t hidden, Rng& rng);

  template <class Self, class F>
  static void visit(Self& self, const std::string& prefix, F&& f) {
    f(prefix + "w_ih", self.w_ih);
    f(prefix + "b_ih", self.b_ih);
    f(prefix + "w_hh", self.w_hh);
    f(prefix + "b_hh", self.b_hh);
  }
};

// Standard LSTM; gate blocks are stacked input, forget, cell, output.
struct LstmParams {
  std::size_t in_channels = 0;
  std::size_t hidden = 0;
  Tensor w_ih;  // [4d x c]
  Tensor b_ih;
  Tensor w_hh;  // [4d x d]
  Tensor b_hh;

  static LstmParams init(std::size_t in_channels, std::size_t hidden, Rng& rng);

  template <class Self, class F>
  static void visit(Self& self, const std::string& prefix, F&& f) {
    f(prefix + "w_ih", self.w_ih);
    f(prefix + "b_ih", self.b_ih);
    f(prefix + "w_hh", self.w_hh);
    f(prefix + "b_hh", self.b_hh);
  }
};

// Per-step two-layer map c -> d -> d with tanh in between; no temporal mixing.
struct MlpParams {
  std::size_t in_channels = 0;
  std::size_t hidden = 0;
  Tensor w1;  // [d x c]
  Tensor b1;
  Tensor w2;  // [d x d]
  Tensor b2;

  static MlpParams init(std::size_t in_channels, std::size_t hidden, Rng& rng);

  template <class Self, class F>
  static void visit(Self& self, const std::string& prefix, F&& f) {
    f(prefix + "w1", self.w1);
    f(prefix + "b1", self.b1);
    f(prefix + "w2", self.w2);
    f(prefix + "b2", self.b2);
  }
};

// x is [L x c] or [N x L x c]; returns every hidden state, [.. x L x d].
// Hidden (and cell) state starts at zero.
Tensor gru_forward_seq(const Tensor& x, const GruParams& params);
Tensor lstm_forward_seq(const Tensor& x, const LstmParams& params);
Tensor mlp_block(const Tensor& x, const MlpParams& params);

std::size_t gru_graph_depth(const GruParams& params, std::size_t seq_len);
std::size_t lstm_graph_depth(const LstmParams& params, std::size_t seq_len);

}  // namespace tpgn
