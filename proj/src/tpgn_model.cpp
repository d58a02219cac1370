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

#include "tpgn/tpgn_model.hpp"

#include <cmath>

#include "tpgn/errors.hpp"
#include "tpgn/graph.hpp"
#include "tpgn/init.hpp"
#include "tpgn/ops.hpp"

namespace tpgn {

TpgnVariant TpgnVariant::parse(std::string_view name) {
  if (name == "full") return {LongCell::kPgn, true};
  if (name == "long") return {LongCell::kPgn, false};
  if (name == "short") return {LongCell::kOff, true};
  if (name == "gru") return {LongCell::kGru, true};
  if (name == "lstm") return {LongCell::kLstm, true};
  if (name == "mlp") return {LongCell::kMlp, true};
  throw ConfigError("unknown variant '" + std::string(name) +
                    "' (expected full, long, short, gru, lstm or mlp)");
}

std::string TpgnVariant::name() const {
  switch (long_branch) {
    case LongCell::kPgn: return short_branch ? "full" : "long";
    case LongCell::kOff: return short_branch ? "short" : "none";
    case LongCell::kGru: return short_branch ? "gru" : "gru-long";
    case LongCell::kLstm: return short_branch ? "lstm" : "lstm-long";
    case LongCell::kMlp: return short_branch ? "mlp" : "mlp-long";
  }
  return "?";
}

void TpgnVariant::validate() const {
  if (long_branch == LongCell::kOff && !short_branch) {
    throw ConfigError("variant must enable at least one branch");
  }
}

void ModelConfig::validate() const {
  variant.validate();
  if (period == 0 || history == 0 || horizon == 0 || d_model == 0) {
    throw ConfigError("history, horizon, period and d_model must be positive");
  }
  if (history % period != 0) {
    throw ConfigError("history length " + std::to_string(history) +
                      " is not a multiple of the period " + std::to_string(period));
  }
  if (horizon % period != 0) {
    throw ConfigError("horizon " + std::to_string(horizon) +
                      " is not a multiple of the period " + std::to_string(period));
  }
  if (variant.long_branch == LongCell::kPgn && rows() < 2) {
    throw ConfigError("the PGN branch needs at least two periods of history (R >= 2)");
  }
}

NormStats compute_norm_stats(std::span<const double> history, bool norm) {
  NormStats s;
  s.norm = norm;
  const double n = static_cast<double>(history.size());
  double sum = 0.0;
  for (double v : history) sum += v;
  s.mu = sum / n;
  double sq = 0.0;
  for (double v : history) sq += (v - s.mu) * (v - s.mu);
  s.sigma = std::sqrt(sq / n);
  if (norm && s.sigma < kNormEpsilon) {
    s.sigma = kNormEpsilon;
    s.degenerate = true;
  }
  return s;
}

PreparedBatch prepare_batch(const Tensor& history, const Tensor& time_features, bool norm,
                            std::size_t period) {
  if (history.rank() != 2 || time_features.rank() != 3 ||
      time_features.dim(0) != history.dim(0) || time_features.dim(1) != history.dim(1)) {
    throw DimensionError("prepare_batch: history " + to_string(history.shape()) +
                         " and time features " + to_string(time_features.shape()) +
                         " disagree");
  }
  const std::size_t batch = history.dim(0), len = history.dim(1);
  const std::size_t ct = time_features.dim(2), c = 1 + ct;
  if (period == 0 || len % period != 0) {
    throw ConfigError("history length " + std::to_string(len) +
                      " is not a multiple of the period " + std::to_string(period));
  }
  const std::size_t rows = len / period;
  PreparedBatch out;
  out.stats.reserve(batch);
  std::vector<double> grid(batch * len * c);
  auto hv = history.values();
  auto tv = time_features.values();
  for (std::size_t b = 0; b < batch; ++b) {
    const auto seq = hv.subspan(b * len, len);
    const NormStats s = compute_norm_stats(seq, norm);
    out.stats.push_back(s);
    for (std::size_t t = 0; t < len; ++t) {
      // Step t = r * period + p lands at (r, p), i.e. the same flat position.
      double* cell = grid.data() + (b * len + t) * c;
      cell[0] = norm ? (seq[t] - s.mu) / s.sigma : seq[t];
      for (std::size_t k = 0; k < ct; ++k) cell[1 + k] = tv[(b * len + t) * ct + k];
    }
  }
  out.grid = Grid2D{Tensor({batch, rows, period, c}, std::move(grid)), rows, period};
  return out;
}

std::pair<Grid2D, NormStats> prepare_input(const SeriesWindow& window, bool norm,
                                           std::size_t period) {
  const std::size_t len = window.history.size();
  const std::size_t ct = window.time_features.size() / std::max<std::size_t>(1, len);
  PreparedBatch b = prepare_batch(window.history.reshaped({1, len}),
                                  window.time_features.reshaped({1, len, ct}), norm, period);
  Grid2D g = b.grid;
  g.data = g.data.reshaped({g.rows, g.period, 1 + ct});
  return {g, b.stats.front()};
}

TpgnParams TpgnParams::init(const ModelConfig& config, Rng& rng) {
  config.validate();
  TpgnParams p;
  p.config = config;
  const std::size_t R = config.rows(), P = config.period, c = config.channels();
  const std::size_t d = config.d_model, Rf = config.future_rows();
  switch (config.variant.long_branch) {
    case LongCell::kPgn: p.cell = PgnParams::init(R, c, d, rng); break;
    case LongCell::kGru: p.cell = GruParams::init(c, d, rng); break;
    case LongCell::kLstm: p.cell = LstmParams::init(c, d, rng); break;
    case LongCell::kMlp: p.cell = MlpParams::init(c, d, rng); break;
    case LongCell::kOff: p.cell = std::monostate{}; break;
  }
  if (p.has_long()) {
    if (config.long_map == LongMap::kShared) {
      p.w_long = init_weight({R}, R, rng);
      p.b_long = init_bias({1});
    } else {
      p.w_long = init_weight({d, R * d}, R * d, rng);
      p.b_long = init_bias({d});
    }
  }
  if (p.has_short()) {
    p.w_row = init_weight({d, P * c}, P * c, rng);
    p.b_row = init_bias({d});
    p.w_col = init_weight({R}, R, rng);
    p.b_col = init_bias({1});
  }
  if (config.head_per_phase) {
    p.w_head = init_weight({P, Rf, 2 * d}, 2 * d, rng);
    p.b_head = init_bias({P, Rf});
  } else {
    p.w_head = init_weight({Rf, 2 * d}, 2 * d, rng);
    p.b_head = init_bias({Rf});
  }
  return p;
}

std::size_t TpgnParams::parameter_count() const {
  std::size_t n = 0;
  visit([&](const std::string&, const Tensor& t) { n += t.size(); });
  return n;
}

namespace {

void check_grid(const Tensor& grid, const ModelConfig& cfg) {
  if (grid.rank() != 4 || grid.dim(1) != cfg.rows() || grid.dim(2) != cfg.period ||
      grid.dim(3) != cfg.channels()) {
    throw DimensionError("grid " + to_string(grid.shape()) + " does not match R=" +
                         std::to_string(cfg.rows()) + ", P=" + std::to_string(cfg.period) +
                         ", c=" + std::to_string(cfg.channels()));
  }
}

}  // namespace

Tensor long_branch(const Tensor& grid, const TpgnParams& params) {
  const ModelConfig& cfg = params.config;
  check_grid(grid, cfg);
  if (!params.has_long()) throw ContractError("long branch is disabled in this variant");
  const std::size_t B = grid.dim(0), R = cfg.rows(), P = cfg.period, c = cfg.channels();
  const std::size_t d = cfg.d_model;
  // Each column becomes a length-R sequence; all B*P columns share the cell.
  const Tensor columns = reshape(permute(grid, {0, 2, 1, 3}), {B * P, R, c});
  const Tensor encoded = std::visit(
      [&](const auto& cell) -> Tensor {
        using T = std::decay_t<decltype(cell)>;
        if constexpr (std::is_same_v<T, PgnParams>) {
          return pgn_forward(columns, cell).out;
        } else if constexpr (std::is_same_v<T, GruParams>) {
          return gru_forward_seq(columns, cell);
        } else if constexpr (std::is_same_v<T, LstmParams>) {
          return lstm_forward_seq(columns, cell);
        } else if constexpr (std::is_same_v<T, MlpParams>) {
          return mlp_block(columns, cell);
        } else {
          throw ContractError("long branch has no cell");
        }
      },
      params.cell);  // [B*P, R, d]
  if (cfg.long_map == LongMap::kShared) {
    const Tensor folded = affine(permute(encoded, {0, 2, 1}), reshape(params.w_long, {1, R}),
                                 params.b_long);  // [B*P, d, 1]
    return reshape(folded, {B, P, d});
  }
  return reshape(affine(reshape(encoded, {B * P, R * d}), params.w_long, params.b_long),
                 {B, P, d});
}

Tensor short_branch(const Tensor& grid, const TpgnParams& params) {
  const ModelConfig& cfg = params.config;
  check_grid(grid, cfg);
  if (!params.has_short()) throw ContractError("short branch is disabled in this variant");
  const std::size_t B = grid.dim(0), R = cfg.rows(), P = cfg.period, c = cfg.channels();
  const std::size_t d = cfg.d_model;
  const Tensor patches = affine(reshape(grid, {B, R, P * c}), params.w_row, params.b_row);
  const Tensor global = affine(permute(patches, {0, 2, 1}), reshape(params.w_col, {1, R}),
                               params.b_col);  // [B, d, 1]
  return broadcast_to(reshape(global, {B, 1, d}), {B, P, d});
}

Tensor forecast_head(const Tensor& h_long, const Tensor& h_global_rep, const TpgnParams& params,
                     std::span<const NormStats> stats) {
  const ModelConfig& cfg = params.config;
  const std::size_t P = cfg.period, d = cfg.d_model, Rf = cfg.future_rows();
  if (h_long.rank() != 3 || h_long.dim(1) != P || h_long.dim(2) != d ||
      h_global_rep.shape() != h_long.shape()) {
    throw DimensionError("forecast_head inputs " + to_string(h_long.shape()) + " and " +
                         to_string(h_global_rep.shape()) + " do not match P=" +
                         std::to_string(P) + ", d=" + std::to_string(d));
  }
  if (Rf * P != cfg.horizon) {
    throw ConfigError("horizon is not R_f * P");
  }
  const std::size_t B = h_long.dim(0);
  if (stats.size() != B) {
    throw DimensionError("forecast_head: " + std::to_string(stats.size()) +
                         " normalization records for a batch of " + std::to_string(B));
  }
  const Tensor joined = concat(2, {h_long, h_global_rep});  // [B, P, 2d]
  Tensor per_column;                                         // [B, P, R_f]
  if (cfg.head_per_phase) {
    const Tensor spread = mul(reshape(joined, {B, P, 1, 2 * d}), params.w_head);
    per_column = add(reduce(Reduction::kSum, spread, 3), params.b_head);
  } else {
    per_column = affine(joined, params.w_head, params.b_head);
  }
  Tensor out = reshape(permute(per_column, {0, 2, 1}), {B, cfg.horizon});

  bool any_norm = false;
  for (const NormStats& s : stats) any_norm = any_norm || s.norm;
  if (!any_norm) return out;
  Tensor sigma({B, 1}, 1.0), mu({B, 1}, 0.0);
  for (std::size_t b = 0; b < B; ++b) {
    if (!stats[b].norm) continue;
    sigma.mutable_values()[b] = stats[b].sigma;
    mu.mutable_values()[b] = stats[b].mu;
  }
  return add(mul(out, sigma), mu);
}

Tensor tpgn_forward_grid(const Tensor& grid, std::span<const NormStats> stats,
                         const TpgnParams& params) {
  const ModelConfig& cfg = params.config;
  check_grid(grid, cfg);
  const Shape branch_shape{grid.dim(0), cfg.period, cfg.d_model};
  const Tensor h_long = params.has_long() ? long_branch(grid, params) : Tensor::zeros(branch_shape);
  const Tensor h_short =
      params.has_short() ? short_branch(grid, params) : Tensor::zeros(branch_shape);
  return forecast_head(h_long, h_short, params, stats);
}

Tensor tpgn_forward(const Tensor& history, const Tensor& time_features, const TpgnParams& params) {
  const ModelConfig& cfg = params.config;
  if (history.rank() != 2 || history.dim(1) != cfg.history) {
    throw DimensionError("history " + to_string(history.shape()) + " does not match L_h=" +
                         std::to_string(cfg.history));
  }
  if (time_features.rank() != 3 || time_features.dim(2) != cfg.time_features) {
    throw DimensionError("time features " + to_string(time_features.shape()) +
                         " do not have " + std::to_string(cfg.time_features) + " channels");
  }
  const PreparedBatch prep = prepare_batch(history, time_features, cfg.norm, cfg.period);
  return tpgn_forward_grid(prep.grid.data, prep.stats, params);
}

Tensor tpgn_forward(const SeriesWindow& window, const TpgnParams& params) {
  const ModelConfig& cfg = params.config;
  const Tensor out =
      tpgn_forward(window.history.reshaped({1, cfg.history}),
                   window.time_features.reshaped({1, cfg.history, cfg.time_features}), params);
  return out.reshaped({cfg.horizon});
}

std::size_t tpgn_graph_depth(const TpgnParams& params) {
  const ModelConfig& cfg = params.config;
  Graph graph;
  const Tensor grid = graph.leaf(Tensor::zeros({1, cfg.rows(), cfg.period, cfg.channels()}));
  const std::vector<NormStats> stats{NormStats{0.0, 1.0, cfg.norm, false}};
  const Tensor out = tpgn_forward_grid(grid, stats, params);
  return graph.longest_path(*grid.node_id(), *out.node_id()).value_or(0);
}

MacReport flop_count(const ModelConfig& cfg) {
  cfg.validate();
  using u64 = std::uint64_t;
  const u64 R = cfg.rows(), P = cfg.period, c = cfg.channels(), d = cfg.d_model;
  const u64 Rf = cfg.future_rows();
  MacReport m;
  switch (cfg.variant.long_branch) {
    case LongCell::kPgn:
      // Step t reads min(t, R-1) real history steps.
      m.long_cell = P * (c * d * (R * (R - 1) / 2) + 2 * R * (d + c) * d);
      m.hie_per_step = (R - 1) * c * d;
      m.gate_per_step = 2 * d * (d + c);
      break;
    case LongCell::kGru:
      m.long_cell = P * R * 3 * d * (c + d);
      m.gate_per_step = 3 * d * (c + d);
      break;
    case LongCell::kLstm:
      m.long_cell = P * R * 4 * d * (c + d);
      m.gate_per_step = 4 * d * (c + d);
      break;
    case LongCell::kMlp:
      m.long_cell = P * R * d * (c + d);
      m.gate_per_step = d * (c + d);
      break;
    case LongCell::kOff: break;
  }
  if (cfg.variant.long_branch != LongCell::kOff) {
    if (cfg.long_map == LongMap::kShared) {
      m.long_map = P * d * R;
      m.long_map_per_output = R;
    } else {
      m.long_map = P * R * d * d;
      m.long_map_per_output = R * d;
    }
  }
  if (cfg.variant.short_branch) {
    m.short_row = R * P * c * d;
    m.short_col = d * R;
    m.row_per_row = P * c * d;
    m.col_per_output = R;
  }
  m.head = P * 2 * d * Rf;
  m.head_per_column = 2 * d * Rf;
  return m;
}

}  // namespace tpgn
