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

#include "tpgn/baselines.hpp"

#include <vector>

#include "tpgn/errors.hpp"
#include "tpgn/graph.hpp"
#include "tpgn/init.hpp"
#include "tpgn/ops.hpp"

namespace tpgn {

GruParams GruParams::init(std::size_t in_channels, std::size_t hidden, Rng& rng) {
  GruParams p;
  p.in_channels = in_channels;
  p.hidden = hidden;
  p.w_ih = init_weight({3 * hidden, in_channels}, in_channels, rng);
  p.b_ih = init_bias({3 * hidden});
  p.w_hh = init_weight({3 * hidden, hidden}, hidden, rng);
  p.b_hh = init_bias({3 * hidden});
  return p;
}

LstmParams LstmParams::init(std::size_t in_channels, std::size_t hidden, Rng& rng) {
  LstmParams p;
  p.in_channels = in_channels;
  p.hidden = hidden;
  p.w_ih = init_weight({4 * hidden, in_channels}, in_channels, rng);
  p.b_ih = init_bias({4 * hidden});
  p.w_hh = init_weight({4 * hidden, hidden}, hidden, rng);
  p.b_hh = init_bias({4 * hidden});
  return p;
}

MlpParams MlpParams::init(std::size_t in_channels, std::size_t hidden, Rng& rng) {
  MlpParams p;
  p.in_channels = in_channels;
  p.hidden = hidden;
  p.w1 = init_weight({hidden, in_channels}, in_channels, rng);
  p.b1 = init_bias({hidden});
  p.w2 = init_weight({hidden, hidden}, hidden, rng);
  p.b2 = init_bias({hidden});
  return p;
}

namespace {

struct SeqView {
  std::size_t batch;
  std::size_t len;
  bool batched;
};

SeqView check_seq(const Tensor& x, std::size_t in_channels, const char* cell) {
  if ((x.rank() != 2 && x.rank() != 3) || x.shape().back() != in_channels ||
      x.shape()[x.rank() - 2] == 0) {
    throw DimensionError(std::string(cell) + " input " + to_string(x.shape()) +
                         " does not have " + std::to_string(in_channels) + " channels");
  }
  return {x.rank() == 3 ? x.dim(0) : 1, x.shape()[x.rank() - 2], x.rank() == 3};
}

Tensor step_input(const Tensor& proj, std::size_t t, std::size_t batch) {
  const std::size_t width = proj.shape().back();
  return reshape(slice(proj, 1, t, 1), {batch, width});
}

Tensor stack_steps(const std::vector<Tensor>& steps, const SeqView& v, std::size_t d) {
  Tensor all = concat(1, steps);
  return v.batched ? all : reshape(all, {v.len, d});
}

}  // namespace

Tensor gru_forward_seq(const Tensor& x, const GruParams& params) {
  const SeqView v = check_seq(x, params.in_channels, "GRU");
  const std::size_t d = params.hidden;
  const Tensor xb = v.batched ? x : reshape(x, {1, v.len, params.in_channels});
  const Tensor proj = affine(xb, params.w_ih, params.b_ih);  // [N, L, 3d], all steps at once
  Tensor h = Tensor::zeros({v.batch, d});
  std::vector<Tensor> steps;
  steps.reserve(v.len);
  for (std::size_t t = 0; t < v.len; ++t) {
    const Tensor xt = step_input(proj, t, v.batch);
    const Tensor hp = affine(h, params.w_hh, params.b_hh);
    const Tensor r = sigmoid(add(slice(xt, 1, 0, d), slice(hp, 1, 0, d)));
    const Tensor z = sigmoid(add(slice(xt, 1, d, d), slice(hp, 1, d, d)));
    const Tensor n = tanh(add(slice(xt, 1, 2 * d, d), mul(r, slice(hp, 1, 2 * d, d))));
    h = add(mul(one_minus(z), n), mul(z, h));
    steps.push_back(reshape(h, {v.batch, 1, d}));
  }
  return stack_steps(steps, v, d);
}

Tensor lstm_forward_seq(const Tensor& x, const LstmParams& params) {
  const SeqView v = check_seq(x, params.in_channels, "LSTM");
  const std::size_t d = params.hidden;
  const Tensor xb = v.batched ? x : reshape(x, {1, v.len, params.in_channels});
  const Tensor proj = affine(xb, params.w_ih, params.b_ih);
  Tensor h = Tensor::zeros({v.batch, d});
  Tensor cell = Tensor::zeros({v.batch, d});
  std::vector<Tensor> steps;
  steps.reserve(v.len);
  for (std::size_t t = 0; t < v.len; ++t) {
    const Tensor pre = add(step_input(proj, t, v.batch), affine(h, params.w_hh, params.b_hh));
    const Tensor i = sigmoid(slice(pre, 1, 0, d));
    const Tensor f = sigmoid(slice(pre, 1, d, d));
    const Tensor g = tanh(slice(pre, 1, 2 * d, d));
    const Tensor o = sigmoid(slice(pre, 1, 3 * d, d));
    cell = add(mul(f, cell), mul(i, g));
    h = mul(o, tanh(cell));
    steps.push_back(reshape(h, {v.batch, 1, d}));
  }
  return stack_steps(steps, v, d);
}

Tensor mlp_block(const Tensor& x, const MlpParams& params) {
  check_seq(x, params.in_channels, "MLP");
  return affine(tanh(affine(x, params.w1, params.b1)), params.w2, params.b2);
}

namespace {

template <class Fn>
std::size_t depth_of(std::size_t seq_len, std::size_t in_channels, Fn&& forward) {
  Graph graph;
  const Tensor x = graph.leaf(Tensor::zeros({seq_len, in_channels}));
  const Tensor out = forward(x);
  return graph.longest_path(*x.node_id(), *out.node_id()).value_or(0);
}

}  // namespace

std::size_t gru_graph_depth(const GruParams& params, std::size_t seq_len) {
  return depth_of(seq_len, params.in_channels,
                  [&](const Tensor& x) { return gru_forward_seq(x, params); });
}

std::size_t lstm_graph_depth(const LstmParams& params, std::size_t seq_len) {
  return depth_of(seq_len, params.in_channels,
                  [&](const Tensor& x) { return lstm_forward_seq(x, params); });
}

}  // namespace tpgn
