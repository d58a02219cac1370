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

#include "tpgn/pgn.hpp"

#include <cmath>
#include <vector>

#include "tpgn/errors.hpp"
#include "tpgn/graph.hpp"
#include "tpgn/init.hpp"
#include "tpgn/ops.hpp"

namespace tpgn {

PgnParams PgnParams::init(std::size_t seq_len, std::size_t in_channels, std::size_t hidden,
                          Rng& rng) {
  if (seq_len < 2) {
    throw ConfigError("PGN needs a sequence length of at least 2, got " +
                      std::to_string(seq_len));
  }
  if (in_channels == 0 || hidden == 0) {
    throw ConfigError("PGN channel and hidden sizes must be positive");
  }
  PgnParams p;
  p.seq_len = seq_len;
  p.in_channels = in_channels;
  p.hidden = hidden;
  const std::size_t hist_in = (seq_len - 1) * in_channels;
  const std::size_t gate_in = hidden + in_channels;
  p.w_hist = init_weight({hidden, hist_in}, hist_in, rng);
  p.b_hist = init_bias({hidden});
  p.w_gate = init_weight({hidden, gate_in}, gate_in, rng);
  p.b_gate = init_bias({hidden});
  p.w_cand = init_weight({hidden, gate_in}, gate_in, rng);
  p.b_cand = init_bias({hidden});
  return p;
}

void PgnParams::validate() const {
  if (seq_len < 2) throw ContractError("PGN sequence length must be at least 2");
  const Shape hist{hidden, (seq_len - 1) * in_channels};
  const Shape gate{hidden, hidden + in_channels};
  const Shape bias{hidden};
  if (w_hist.shape() != hist || w_gate.shape() != gate || w_cand.shape() != gate ||
      b_hist.shape() != bias || b_gate.shape() != bias || b_cand.shape() != bias) {
    throw DimensionError("PGN parameter shapes do not match L=" + std::to_string(seq_len) +
                         ", c=" + std::to_string(in_channels) +
                         ", d=" + std::to_string(hidden));
  }
}

namespace {

void check_input(const Tensor& x, const PgnParams& params) {
  params.validate();
  if (x.rank() < 2 || x.shape()[x.rank() - 2] != params.seq_len ||
      x.shape().back() != params.in_channels) {
    throw DimensionError("PGN input " + to_string(x.shape()) + " does not match L=" +
                         std::to_string(params.seq_len) +
                         ", c=" + std::to_string(params.in_channels));
  }
}

}  // namespace

Tensor hie_forward(const Tensor& x, const PgnParams& params) {
  check_input(x, params);
  return window_linear(x, params.w_hist, params.b_hist, params.seq_len - 1);
}

PgnOutput pgn_forward(const Tensor& x, const PgnParams& params) {
  PgnOutput o;
  o.hist = hie_forward(x, params);
  const Tensor joined = concat(x.rank() - 1, {x, o.hist});
  o.gate = sigmoid(affine(joined, params.w_gate, params.b_gate));
  o.cand = tanh(affine(joined, params.w_cand, params.b_cand));
  o.out = add(mul(o.gate, o.hist), mul(one_minus(o.gate), o.cand));
  return o;
}

PgnOutput pgn_forward_oracle(const Tensor& x, const PgnParams& params) {
  check_input(x, params);
  const std::size_t L = params.seq_len, c = params.in_channels, d = params.hidden;
  const std::size_t window = L - 1;
  const std::size_t batch = x.size() / (L * c);
  Shape out_shape = x.shape();
  out_shape.back() = d;
  std::vector<double> H(batch * L * d), G(batch * L * d), Hh(batch * L * d), O(batch * L * d);
  auto xv = x.values();
  auto wh = params.w_hist.values();
  auto bh = params.b_hist.values();
  auto wg = params.w_gate.values();
  auto bg = params.b_gate.values();
  auto wt = params.w_cand.values();
  auto bt = params.b_cand.values();

  for (std::size_t n = 0; n < batch; ++n) {
    const double* seq = xv.data() + n * L * c;
    // Explicit front padding with `window` zero steps.
    std::vector<double> padded(window * c, 0.0);
    padded.insert(padded.end(), seq, seq + L * c);
    for (std::size_t t = 0; t < L; ++t) {
      // Steps t-window .. t-1 of the original sequence = padded rows t .. t+window-1.
      std::vector<double> hist_window(padded.begin() + static_cast<std::ptrdiff_t>(t * c),
                                      padded.begin() + static_cast<std::ptrdiff_t>((t + window) * c));
      std::vector<double> h(d), gate_in(c + d);
      for (std::size_t j = 0; j < d; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < window * c; ++k) acc += wh[j * window * c + k] * hist_window[k];
        h[j] = acc + bh[j];
      }
      for (std::size_t k = 0; k < c; ++k) gate_in[k] = seq[t * c + k];
      for (std::size_t j = 0; j < d; ++j) gate_in[c + j] = h[j];
      const std::size_t base = (n * L + t) * d;
      for (std::size_t j = 0; j < d; ++j) {
        double ag = 0.0, at = 0.0;
        for (std::size_t k = 0; k < c + d; ++k) {
          ag += wg[j * (c + d) + k] * gate_in[k];
          at += wt[j * (c + d) + k] * gate_in[k];
        }
        const double g = 1.0 / (1.0 + std::exp(-(ag + bg[j])));
        const double cand = std::tanh(at + bt[j]);
        H[base + j] = h[j];
        G[base + j] = g;
        Hh[base + j] = cand;
        O[base + j] = g * h[j] + (1.0 - g) * cand;
      }
    }
  }
  return PgnOutput{Tensor(out_shape, std::move(H)), Tensor(out_shape, std::move(G)),
                   Tensor(out_shape, std::move(Hh)), Tensor(out_shape, std::move(O))};
}

std::size_t pgn_graph_depth(const PgnParams& params) {
  Graph graph;
  const Tensor x = graph.leaf(Tensor::zeros({params.seq_len, params.in_channels}));
  const PgnOutput o = pgn_forward(x, params);
  return graph.longest_path(*x.node_id(), *o.out.node_id()).value_or(0);
}

}  // namespace tpgn
