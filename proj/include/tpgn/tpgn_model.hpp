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
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "tpgn/baselines.hpp"
#include "tpgn/pgn.hpp"
#include "tpgn/random.hpp"
#include "tpgn/tensor.hpp"

namespace tpgn {

// Cell used by the long-term branch.
enum class LongCell { kPgn, kGru, kLstm, kMlp, kOff };

struct TpgnVariant {
  LongCell long_branch = LongCell::kPgn;
  bool short_branch = true;

  // full | long | short | gru | lstm | mlp
  static TpgnVariant parse(std::string_view name);
  std::string name() const;
  void validate() const;
  bool operator==(const TpgnVariant&) const = default;
};

// How the long branch folds the R rows of each column into one vector.
enum class LongMap {
  kShared,  // one weight per row, shared by all hidden channels
  kFull,    // dense (R*d) -> d map
};

struct ModelConfig {
  std::size_t history = 168;  // L_h
  std::size_t horizon = 168;  // L_f
  std::size_t period = 24;    // P
  std::size_t d_model = 32;
  std::size_t time_features = 4;
  bool norm = true;
  TpgnVariant variant;
  bool head_per_phase = false;
  LongMap long_map = LongMap::kShared;

  std::size_t rows() const { return history / period; }          // R
  std::size_t future_rows() const { return horizon / period; }   // R_f
  std::size_t channels() const { return 1 + time_features; }     // c
  // Throws ConfigError when lengths are not multiples of the period, etc.
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

inline constexpr double kNormEpsilon = 1e-5;

// Per-window statistics of the history. With norm enabled the history is
// mapped to (x - mu) / sigma and predictions are mapped back.
struct NormStats {
  double mu = 0.0;
  double sigma = 1.0;  // population standard deviation
  bool norm = false;
  bool degenerate = false;  // sigma was below kNormEpsilon and was replaced by it
};

NormStats compute_norm_stats(std::span<const double> history, bool norm);

struct SeriesWindow {
  Tensor history;        // [L_h], original units
  Tensor time_features;  // [L_h x C_time], each in [-0.5, 0.5]
  Tensor target;         // [L_f]
};

// Period-major 2D layout of a window: element (r, p, k) is channel k of step
// r * period + p. Channel 0 is the (normalized) value, the rest are the time
// features. data is [R x P x c], or [B x R x P x c] for a batch.
struct Grid2D {
  Tensor data;
  std::size_t rows = 0;
  std::size_t period = 0;
};

std::pair<Grid2D, NormStats> prepare_input(const SeriesWindow& window, bool norm,
                                           std::size_t period);

struct PreparedBatch {
  Grid2D grid;                   // [B x R x P x c]
  std::vector<NormStats> stats;  // one per window
};

// history [B x L_h], time_features [B x L_h x C_time].
PreparedBatch prepare_batch(const Tensor& history, const Tensor& time_features, bool norm,
                            std::size_t period);

struct TpgnParams {
  ModelConfig config;
  std::variant<std::monostate, PgnParams, GruParams, LstmParams, MlpParams> cell;
  Tensor w_long;  // shared: [R]; full: [d x R*d]
  Tensor b_long;  // shared: [1]; full: [d]
  Tensor w_row;   // [d x P*c]
  Tensor b_row;   // [d]
  Tensor w_col;   // [R]
  Tensor b_col;   // [1]
  Tensor w_head;  // shared: [R_f x 2d]; per phase: [P x R_f x 2d]
  Tensor b_head;  // shared: [R_f]; per phase: [P x R_f]

  static TpgnParams init(const ModelConfig& config, Rng& rng);

  bool has_long() const { return config.variant.long_branch != LongCell::kOff; }
  bool has_short() const { return config.variant.short_branch; }

  // Calls f(name, tensor) for every trainable tensor in a fixed order.
  template <class F>
  void visit(F&& f) { visit_impl(*this, f); }
  template <class F>
  void visit(F&& f) const { visit_impl(*this, f); }

  std::size_t parameter_count() const;

 private:
  template <class Self, class F>
  static void visit_impl(Self& self, F& f) {
    if (self.has_long()) {
      std::visit(
          [&](auto& cell) {
            using T = std::decay_t<decltype(cell)>;
            if constexpr (std::is_same_v<T, PgnParams>) {
              PgnParams::visit(cell, "long.pgn.", f);
            } else if constexpr (std::is_same_v<T, GruParams>) {
              GruParams::visit(cell, "long.gru.", f);
            } else if constexpr (std::is_same_v<T, LstmParams>) {
              LstmParams::visit(cell, "long.lstm.", f);
            } else if constexpr (std::is_same_v<T, MlpParams>) {
              MlpParams::visit(cell, "long.mlp.", f);
            }
          },
          self.cell);
      f(std::string("long.w_map"), self.w_long);
      f(std::string("long.b_map"), self.b_long);
    }
    if (self.has_short()) {
      f(std::string("short.w_row"), self.w_row);
      f(std::string("short.b_row"), self.b_row);
      f(std::string("short.w_col"), self.w_col);
      f(std::string("short.b_col"), self.b_col);
    }
    f(std::string("head.w"), self.w_head);
    f(std::string("head.b"), self.b_head);
  }
};

// Column-wise long-term branch: grid [B x R x P x c] -> H_long [B x P x d].
Tensor long_branch(const Tensor& grid, const TpgnParams& params);
// Row patches folded into a global vector, repeated per column: [B x P x d].
Tensor short_branch(const Tensor& grid, const TpgnParams& params);
// Per-column head producing [B x L_f] with output index r_f * P + p, then
// mapped back to original units for windows whose stats have norm set.
Tensor forecast_head(const Tensor& h_long, const Tensor& h_global_rep, const TpgnParams& params,
                     std::span<const NormStats> stats);

// Both branches and the head on an already prepared grid.
Tensor tpgn_forward_grid(const Tensor& grid, std::span<const NormStats> stats,
                         const TpgnParams& params);
// history [B x L_h], time_features [B x L_h x C_time] -> [B x L_f].
Tensor tpgn_forward(const Tensor& history, const Tensor& time_features, const TpgnParams& params);
Tensor tpgn_forward(const SeriesWindow& window, const TpgnParams& params);

// Longest operation chain from the input grid to the forecast.
std::size_t tpgn_graph_depth(const TpgnParams& params);

// Multiply-accumulate counts for one window.
struct MacReport {
  // Work executed by the kernels for a forward pass over one window. Zero
  // padding in front of the history window is skipped and not counted.
  std::uint64_t long_cell = 0;
  std::uint64_t long_map = 0;
  std::uint64_t short_row = 0;
  std::uint64_t short_col = 0;
  std::uint64_t head = 0;
  std::uint64_t total() const { return long_cell + long_map + short_row + short_col + head; }

  // Cost of a single application of each layer (one step, one row, one
  // column). HIE is counted at its nominal (R-1)*c*d including padding.
  std::uint64_t hie_per_step = 0;
  std::uint64_t gate_per_step = 0;
  std::uint64_t long_map_per_output = 0;
  std::uint64_t row_per_row = 0;
  std::uint64_t col_per_output = 0;
  std::uint64_t head_per_column = 0;
  std::uint64_t per_layer() const {
    return hie_per_step + gate_per_step + long_map_per_output + row_per_row + col_per_output +
           head_per_column;
  }
  // The part of per_layer() whose size depends on the history length.
  std::uint64_t per_layer_length_dependent() const {
    return hie_per_step + long_map_per_output + row_per_row + col_per_output;
  }
};

MacReport flop_count(const ModelConfig& config);

}  // namespace tpgn
