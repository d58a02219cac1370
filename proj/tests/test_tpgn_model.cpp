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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "tpgn/commands.hpp"
#include "tpgn/errors.hpp"
#include "tpgn/ops.hpp"
#include "tpgn/tpgn_model.hpp"

namespace tpgn {
namespace {

ModelConfig tiny(std::size_t time_features = 0) {
  ModelConfig cfg;
  cfg.history = 8;
  cfg.horizon = 8;
  cfg.period = 4;
  cfg.d_model = 2;
  cfg.time_features = time_features;
  cfg.norm = false;
  return cfg;
}

void randomize(TpgnParams& p, Rng& rng) {
  p.visit([&](const std::string&, Tensor& t) {
    for (double& v : t.mutable_values()) v = rng.uniform(-1, 1);
  });
}

void zero_all(TpgnParams& p) {
  p.visit([](const std::string&, Tensor& t) {
    for (double& v : t.mutable_values()) v = 0.0;
  });
}

Tensor random_tensor(Shape shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& v : t.mutable_values()) v = rng.uniform(-1, 1);
  return t;
}

SeriesWindow window_of(std::vector<double> history, std::size_t features, std::size_t horizon) {
  const std::size_t n = history.size();
  return SeriesWindow{Tensor({n}, std::move(history)), Tensor({n, features}),
                      Tensor({horizon})};
}

TEST(TpgnVariantTest, ParseAndName) {
  for (const char* name : {"full", "long", "short", "gru", "lstm", "mlp"}) {
    EXPECT_EQ(TpgnVariant::parse(name).name(), name);
  }
  EXPECT_THROW(TpgnVariant::parse("both"), ConfigError);
  EXPECT_THROW((TpgnVariant{LongCell::kOff, false}.validate()), ConfigError);
}

TEST(ModelConfigTest, Validation) {
  ModelConfig cfg = tiny();
  EXPECT_NO_THROW(cfg.validate());
  cfg.history = 10;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = tiny();
  cfg.horizon = 6;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = tiny();
  cfg.history = 4;  // R = 1
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.variant = TpgnVariant::parse("short");
  EXPECT_NO_THROW(cfg.validate());
}

TEST(PrepareInputTest, ReshapeIsRowMajorByPeriod) {
  const auto [grid, stats] = prepare_input(window_of({1, 2, 3, 4}, 0, 2), false, 2);
  EXPECT_EQ(grid.data.shape(), (Shape{2, 2, 1}));
  EXPECT_EQ(grid.rows, 2u);
  EXPECT_EQ(grid.data.to_vector(), (std::vector<double>{1, 2, 3, 4}));
  EXPECT_FALSE(stats.norm);
}

TEST(PrepareInputTest, NormalizesWithPopulationVariance) {
  const auto [grid, stats] = prepare_input(window_of({1, 2, 3}, 0, 3), true, 3);
  EXPECT_DOUBLE_EQ(stats.mu, 2.0);
  EXPECT_NEAR(stats.sigma * stats.sigma, 2.0 / 3.0, 1e-15);
  const auto v = grid.data.values();
  EXPECT_NEAR(v[0], -std::sqrt(1.5), 1e-15);
  EXPECT_NEAR(v[2], std::sqrt(1.5), 1e-15);
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / 3;
  double var = 0;
  for (double x : v) var += (x - mean) * (x - mean) / 3;
  EXPECT_LT(std::abs(mean), 1e-9);
  EXPECT_NEAR(var, 1.0, 1e-6);
}

TEST(PrepareInputTest, ConstantSeriesUsesEpsilon) {
  const auto [grid, stats] = prepare_input(window_of({5, 5, 5, 5}, 0, 4), true, 2);
  EXPECT_TRUE(stats.degenerate);
  EXPECT_DOUBLE_EQ(stats.sigma, kNormEpsilon);
  for (double v : grid.data.values()) EXPECT_EQ(v, 0.0);
}

TEST(PrepareInputTest, TimeFeaturesFollowValue) {
  SeriesWindow w = window_of({1, 2, 3, 4}, 1, 2);
  w.time_features = Tensor({4, 1}, {0.1, 0.2, 0.3, 0.4});
  const auto [grid, stats] = prepare_input(w, false, 2);
  EXPECT_EQ(grid.data.shape(), (Shape{2, 2, 2}));
  EXPECT_DOUBLE_EQ(grid.data.at({1, 0, 0}), 3);
  EXPECT_DOUBLE_EQ(grid.data.at({1, 0, 1}), 0.3);
}

TEST(PrepareInputTest, IndivisibleLengthRejected) {
  EXPECT_THROW(prepare_input(window_of({1, 2, 3}, 0, 2), false, 2), ConfigError);
}

TEST(TpgnParamsTest, Shapes) {
  Rng rng(1);
  ModelConfig cfg = tiny(4);
  const TpgnParams p = TpgnParams::init(cfg, rng);
  EXPECT_EQ(p.w_long.shape(), (Shape{2}));
  EXPECT_EQ(p.w_row.shape(), (Shape{2, 20}));
  EXPECT_EQ(p.w_col.shape(), (Shape{2}));
  EXPECT_EQ(p.w_head.shape(), (Shape{2, 4}));
  EXPECT_EQ(std::get<PgnParams>(p.cell).seq_len, 2u);
  cfg.long_map = LongMap::kFull;
  cfg.head_per_phase = true;
  const TpgnParams q = TpgnParams::init(cfg, rng);
  EXPECT_EQ(q.w_long.shape(), (Shape{2, 4}));
  EXPECT_EQ(q.w_head.shape(), (Shape{4, 2, 4}));
}

TEST(LongBranchTest, ZeroGridGivesBias) {
  Rng rng(2);
  TpgnParams p = TpgnParams::init(tiny(), rng);
  zero_all(p);
  randomize(p, rng);
  auto& cell = std::get<PgnParams>(p.cell);
  for (Tensor* t : {&cell.b_hist, &cell.b_gate, &cell.b_cand}) *t = Tensor::zeros(t->shape());
  const Tensor h = long_branch(Tensor({1, 2, 4, 1}), p);
  for (double v : h.values()) EXPECT_DOUBLE_EQ(v, p.b_long[0]);
}

TEST(LongBranchTest, MatchesComposedOracle) {
  Rng rng(3);
  ModelConfig cfg = tiny();
  cfg.period = 1;
  cfg.history = 2;
  cfg.horizon = 1;
  cfg.d_model = 1;
  TpgnParams p = TpgnParams::init(cfg, rng);
  randomize(p, rng);
  const Tensor grid = random_tensor({1, 2, 1, 1}, rng);
  const Tensor h = long_branch(grid, p);
  const PgnOutput o = pgn_forward_oracle(grid.reshaped({2, 1}), std::get<PgnParams>(p.cell));
  const double want = p.w_long[0] * o.out[0] + p.w_long[1] * o.out[1] + p.b_long[0];
  EXPECT_NEAR(h.item(), want, 1e-12);
}

TEST(LongBranchTest, ColumnsAreIndependent) {
  Rng rng(4);
  TpgnParams p = TpgnParams::init(tiny(1), rng);
  randomize(p, rng);
  const Tensor grid = random_tensor({1, 2, 4, 2}, rng);
  const Tensor base = long_branch(grid, p);
  Tensor zeroed = grid;
  auto zv = zeroed.mutable_values();
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t k = 0; k < 2; ++k) zv[(r * 4 + 2) * 2 + k] = 0.0;  // column p=2
  const Tensor changed = long_branch(zeroed, p);
  for (std::size_t q = 0; q < 4; ++q) {
    const bool same = bitwise_equal(slice(base, 1, q, 1), slice(changed, 1, q, 1));
    EXPECT_EQ(same, q != 2) << "column " << q;
  }
}

TEST(LongBranchTest, SwappingColumnsSwapsOutputs) {
  Rng rng(5);
  TpgnParams p = TpgnParams::init(tiny(), rng);
  randomize(p, rng);
  const Tensor grid = random_tensor({1, 2, 4, 1}, rng);
  Tensor swapped = grid;
  auto sv = swapped.mutable_values();
  for (std::size_t r = 0; r < 2; ++r) std::swap(sv[r * 4 + 0], sv[r * 4 + 3]);
  const Tensor a = long_branch(grid, p), b = long_branch(swapped, p);
  EXPECT_TRUE(bitwise_equal(slice(a, 1, 0, 1), slice(b, 1, 3, 1)));
  EXPECT_TRUE(bitwise_equal(slice(a, 1, 1, 1), slice(b, 1, 1, 1)));
}

TEST(ShortBranchTest, ZeroGridZeroBiases) {
  Rng rng(6);
  TpgnParams p = TpgnParams::init(tiny(), rng);
  const Tensor h = short_branch(Tensor({1, 2, 4, 1}), p);
  for (double v : h.values()) EXPECT_EQ(v, 0.0);
}

TEST(ShortBranchTest, MatchesTwoMatmulOracle) {
  Rng rng(7);
  ModelConfig cfg = tiny();
  cfg.history = 4;
  cfg.period = 2;
  cfg.horizon = 2;
  cfg.d_model = 1;
  TpgnParams p = TpgnParams::init(cfg, rng);
  randomize(p, rng);
  const Tensor grid = random_tensor({1, 2, 2, 1}, rng);
  const Tensor h = short_branch(grid, p);
  const auto g = grid.values();
  double global = p.b_col[0];
  for (std::size_t r = 0; r < 2; ++r) {
    const double row = p.w_row[0] * g[r * 2] + p.w_row[1] * g[r * 2 + 1] + p.b_row[0];
    global += p.w_col[r] * row;
  }
  EXPECT_EQ(h.shape(), (Shape{1, 2, 1}));
  EXPECT_NEAR(h[0], global, 1e-14);
  EXPECT_DOUBLE_EQ(h[0], h[1]);
}

TEST(ShortBranchTest, SingleRow) {
  Rng rng(8);
  ModelConfig cfg = tiny();
  cfg.history = 4;
  cfg.variant = TpgnVariant::parse("short");
  TpgnParams p = TpgnParams::init(cfg, rng);
  randomize(p, rng);
  const Tensor grid = random_tensor({1, 1, 4, 1}, rng);
  const Tensor h = short_branch(grid, p);
  const Tensor row = affine(grid.reshaped({1, 4}), p.w_row, p.b_row);
  for (std::size_t q = 0; q < 4; ++q)
    for (std::size_t j = 0; j < 2; ++j)
      EXPECT_NEAR(h.at({0, q, j}), p.w_col[0] * row[j] + p.b_col[0], 1e-15);
}

class HeadTest : public ::testing::Test {
 protected:
  HeadTest() {
    cfg_.history = 4;
    cfg_.horizon = 4;
    cfg_.period = 2;
    cfg_.d_model = 1;
    cfg_.time_features = 0;
    cfg_.norm = false;
    Rng rng(9);
    params_ = TpgnParams::init(cfg_, rng);
    zero_all(params_);
  }
  ModelConfig cfg_;
  TpgnParams params_;
  std::vector<NormStats> plain_{NormStats{}};
};

TEST_F(HeadTest, ConstantHeadTilesBias) {
  params_.b_head = Tensor::from({3, 7});
  const Tensor out = forecast_head(Tensor({1, 2, 1}, {5, -5}), Tensor({1, 2, 1}), params_, plain_);
  EXPECT_EQ(out.to_vector(), (std::vector<double>{3, 3, 7, 7}));
}

// y2d = [[a, b], [c, d]] with rows indexed by phase gives [a, c, b, d].
TEST_F(HeadTest, IndexMapping) {
  params_.w_head = Tensor({2, 2}, {1, 0, 10, 0});
  const Tensor h_long({1, 2, 1}, {1, 2});  // a=1, b=10, c=2, d=20
  const Tensor out = forecast_head(h_long, Tensor({1, 2, 1}), params_, plain_);
  EXPECT_EQ(out.to_vector(), (std::vector<double>{1, 2, 10, 20}));
}

TEST_F(HeadTest, DeltaProbe) {
  for (std::size_t rf = 0; rf < 2; ++rf) {
    for (std::size_t p = 0; p < 2; ++p) {
      ModelConfig cfg = cfg_;
      cfg.head_per_phase = true;
      Rng rng(1);
      TpgnParams q = TpgnParams::init(cfg, rng);
      zero_all(q);
      q.b_head.mutable_values()[p * 2 + rf] = 1.0;
      const Tensor out = forecast_head(Tensor({1, 2, 1}), Tensor({1, 2, 1}), q, plain_);
      for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(out[i], i == rf * 2 + p ? 1.0 : 0.0);
    }
  }
}

TEST_F(HeadTest, Denormalizes) {
  params_.b_head = Tensor::from({1, -1});
  const std::vector<NormStats> stats{NormStats{10.0, 2.0, true, false}};
  const Tensor out = forecast_head(Tensor({1, 2, 1}), Tensor({1, 2, 1}), params_, stats);
  EXPECT_EQ(out.to_vector(), (std::vector<double>{12, 12, 8, 8}));
}

TEST_F(HeadTest, ShapeMismatch) {
  EXPECT_THROW(forecast_head(Tensor({1, 3, 1}), Tensor({1, 3, 1}), params_, plain_),
               DimensionError);
}

TEST(TpgnForwardTest, ZeroModelPredictsBias) {
  Rng rng(10);
  TpgnParams p = TpgnParams::init(tiny(4), rng);
  zero_all(p);
  p.b_head = Tensor::from({0.5, -0.25});
  SeriesWindow w = window_of({1, 2, 3, 4, 5, 6, 7, 8}, 4, 8);
  const Tensor out = tpgn_forward(w, p);
  EXPECT_EQ(out.to_vector(), (std::vector<double>{0.5, 0.5, 0.5, 0.5, -0.25, -0.25, -0.25, -0.25}));
}

TEST(TpgnForwardTest, OutputLengthForAllVariants) {
  for (const char* v : {"full", "long", "short", "gru", "lstm", "mlp"}) {
    ModelConfig cfg = tiny(4);
    cfg.horizon = 12;
    cfg.variant = TpgnVariant::parse(v);
    Rng rng(11);
    const TpgnParams p = TpgnParams::init(cfg, rng);
    const Tensor out =
        tpgn_forward(random_tensor({3, 8}, rng), random_tensor({3, 8, 4}, rng), p);
    EXPECT_EQ(out.shape(), (Shape{3, 12})) << v;
    EXPECT_TRUE(out.all_finite());
  }
}

TEST(TpgnForwardTest, LongOffEqualsZeroLongBranch) {
  ModelConfig cfg = tiny(1);
  cfg.variant = TpgnVariant::parse("short");
  Rng rng(12);
  TpgnParams p = TpgnParams::init(cfg, rng);
  randomize(p, rng);
  const Tensor grid = random_tensor({2, 2, 4, 2}, rng);
  const std::vector<NormStats> stats(2);
  const Tensor want = forecast_head(Tensor({2, 4, 2}), short_branch(grid, p), p, stats);
  EXPECT_TRUE(bitwise_equal(tpgn_forward_grid(grid, stats, p), want));
}

TEST(TpgnForwardTest, MatchesChainedOracles) {
  ModelConfig cfg = tiny();
  Rng rng(13);
  TpgnParams p = TpgnParams::init(cfg, rng);
  randomize(p, rng);
  const Tensor history = random_tensor({1, 8}, rng);
  const Tensor out = tpgn_forward(history, Tensor({1, 8, 0}), p);

  // Long branch per column through the scalar PGN oracle.
  const auto hv = history.values();
  std::vector<double> h_long(4 * 2), h_short(2);
  const auto& cell = std::get<PgnParams>(p.cell);
  for (std::size_t col = 0; col < 4; ++col) {
    const PgnOutput o = pgn_forward_oracle(Tensor({2, 1}, {hv[col], hv[4 + col]}), cell);
    for (std::size_t j = 0; j < 2; ++j)
      h_long[col * 2 + j] = p.w_long[0] * o.out[j] + p.w_long[1] * o.out[2 + j] + p.b_long[0];
  }
  for (std::size_t j = 0; j < 2; ++j) {
    double g = p.b_col[0];
    for (std::size_t r = 0; r < 2; ++r) {
      double row = p.b_row[j];
      for (std::size_t k = 0; k < 4; ++k) row += p.w_row[j * 4 + k] * hv[r * 4 + k];
      g += p.w_col[r] * row;
    }
    h_short[j] = g;
  }
  for (std::size_t rf = 0; rf < 2; ++rf) {
    for (std::size_t col = 0; col < 4; ++col) {
      double y = p.b_head[rf];
      for (std::size_t j = 0; j < 2; ++j) {
        y += p.w_head[rf * 4 + j] * h_long[col * 2 + j];
        y += p.w_head[rf * 4 + 2 + j] * h_short[j];
      }
      EXPECT_NEAR(out[rf * 4 + col], y, 1e-12) << rf << "," << col;
    }
  }
}

TEST(TpgnForwardTest, NormalizationRoundTrip) {
  ModelConfig cfg = tiny(4);
  cfg.norm = true;
  Rng rng(14);
  TpgnParams p = TpgnParams::init(cfg, rng);
  randomize(p, rng);
  const Tensor x = random_tensor({2, 8}, rng);
  const Tensor tf({2, 8, 4});
  const double a = 3.5, b = -7.0;
  const Tensor shifted = add(scale(x, a), Tensor::scalar(b));
  const Tensor base = tpgn_forward(x, tf, p);
  const Tensor moved = tpgn_forward(shifted, tf, p);
  for (std::size_t i = 0; i < base.size(); ++i) EXPECT_NEAR(moved[i], a * base[i] + b, 1e-9);
}

TEST(TpgnForwardTest, RejectsBadShapes) {
  Rng rng(15);
  const TpgnParams p = TpgnParams::init(tiny(4), rng);
  EXPECT_THROW(tpgn_forward(Tensor({1, 12}), Tensor({1, 12, 4}), p), DimensionError);
  EXPECT_THROW(tpgn_forward(Tensor({1, 8}), Tensor({1, 8, 3}), p), DimensionError);
}

TEST(TpgnGradTest, EveryTensorPasses) {
  for (const char* v : {"full", "gru", "lstm", "mlp"}) {
    ModelConfig cfg = tiny(4);
    cfg.variant = TpgnVariant::parse(v);
    cfg.norm = true;
    for (const auto& [name, err] : gradcheck_model(cfg, 5)) EXPECT_LT(err, 1e-5) << v << " " << name;
  }
}

TEST(TpgnDepthTest, IndependentOfRows) {
  ModelConfig cfg = tiny();
  Rng rng(16);
  const std::size_t d2 = tpgn_graph_depth(TpgnParams::init(cfg, rng));
  cfg.history = 64;
  const std::size_t d16 = tpgn_graph_depth(TpgnParams::init(cfg, rng));
  EXPECT_EQ(d2, d16);
  cfg.variant = TpgnVariant::parse("gru");
  EXPECT_GE(tpgn_graph_depth(TpgnParams::init(cfg, rng)), 16u);
}

TEST(FlopCountTest, HieTermPerStep) {
  ModelConfig cfg = tiny(4);
  cfg.history = 40;  // R = 10
  cfg.d_model = 8;
  EXPECT_EQ(flop_count(cfg).hie_per_step, 9u * 5u * 8u);
}

TEST(FlopCountTest, GateCostIndependentOfPeriod) {
  ModelConfig cfg = tiny(4);
  const MacReport a = flop_count(cfg);
  cfg.period = 8;
  cfg.history = 16;
  cfg.horizon = 16;
  const MacReport b = flop_count(cfg);
  EXPECT_EQ(a.gate_per_step, b.gate_per_step);
  EXPECT_EQ(a.hie_per_step, b.hie_per_step);
}

TEST(FlopCountTest, QuadruplingHistoryDoublesLayerWidths) {
  ModelConfig cfg = tiny(4);
  cfg.history = 64;
  cfg.period = 8;
  cfg.horizon = 64;
  const MacReport a = flop_count(cfg);
  cfg.history = 256;
  cfg.period = 16;
  cfg.horizon = 256;
  const MacReport b = flop_count(cfg);
  EXPECT_EQ(b.row_per_row, 2 * a.row_per_row);
  EXPECT_EQ(b.col_per_output, 2 * a.col_per_output);
  EXPECT_EQ(b.long_map_per_output, 2 * a.long_map_per_output);
}

TEST(FlopCountTest, MatchesExecutedKernels) {
  for (const char* v : {"full", "long", "short", "gru", "lstm", "mlp"}) {
    ModelConfig cfg = tiny(4);
    cfg.history = 24;
    cfg.variant = TpgnVariant::parse(v);
    Rng rng(17);
    const TpgnParams p = TpgnParams::init(cfg, rng);
    reset_mac_count();
    (void)tpgn_forward(Tensor({1, 24}), Tensor({1, 24, 4}), p);
    EXPECT_EQ(mac_count(), flop_count(cfg).total()) << v;
  }
}

}  // namespace
}  // namespace tpgn
