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

#include "tpgn/errors.hpp"
#include "tpgn/gradcheck.hpp"
#include "tpgn/graph.hpp"
#include "tpgn/ops.hpp"
#include "tpgn/pgn.hpp"

namespace tpgn {
namespace {

void randomize(PgnParams& p, Rng& rng) {
  PgnParams::visit(p, "", [&](const std::string&, Tensor& t) {
    for (double& v : t.mutable_values()) v = rng.uniform(-1, 1);
  });
}

Tensor random_input(Shape shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& v : t.mutable_values()) v = rng.uniform(-1, 1);
  return t;
}

TEST(PgnTest, InitShapes) {
  Rng rng(1);
  const PgnParams p = PgnParams::init(5, 2, 3, rng);
  EXPECT_EQ(p.w_hist.shape(), (Shape{3, 8}));
  EXPECT_EQ(p.w_gate.shape(), (Shape{3, 5}));
  EXPECT_EQ(p.b_cand.shape(), (Shape{3}));
}

TEST(PgnTest, RejectsLengthOne) {
  Rng rng(1);
  EXPECT_THROW(PgnParams::init(1, 1, 2, rng), ConfigError);
}

TEST(PgnTest, RejectsMismatchedInput) {
  Rng rng(1);
  const PgnParams p = PgnParams::init(4, 2, 3, rng);
  EXPECT_THROW(pgn_forward(Tensor({5, 2}), p), DimensionError);
  EXPECT_THROW(pgn_forward(Tensor({4, 3}), p), DimensionError);
}

// First step sees only padding, so H_0 is the history bias.
TEST(PgnTest, FirstStepHistoryIsBias) {
  Rng rng(2);
  PgnParams p = PgnParams::init(6, 1, 4, rng);
  randomize(p, rng);
  const PgnOutput o = pgn_forward(random_input({6, 1}, rng), p);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(o.hist.at({0, j}), p.b_hist[j]);
}

TEST(PgnTest, MatchesOracleAcrossShapes) {
  Rng rng(3);
  for (std::size_t L : {2u, 3u, 9u, 33u}) {
    for (std::size_t c : {1u, 3u}) {
      PgnParams p = PgnParams::init(L, c, 5, rng);
      randomize(p, rng);
      const Tensor x = random_input({2, L, c}, rng);
      const PgnOutput fast = pgn_forward(x, p);
      const PgnOutput slow = pgn_forward_oracle(x, p);
      EXPECT_LE(max_abs_diff(fast.hist, slow.hist), 1e-12) << "L=" << L << " c=" << c;
      EXPECT_LE(max_abs_diff(fast.gate, slow.gate), 1e-12);
      EXPECT_LE(max_abs_diff(fast.cand, slow.cand), 1e-12);
      EXPECT_LE(max_abs_diff(fast.out, slow.out), 1e-12);
    }
  }
}

TEST(PgnTest, OutputIsConvexMixOfHistoryAndCandidate) {
  Rng rng(4);
  PgnParams p = PgnParams::init(8, 2, 3, rng);
  randomize(p, rng);
  const PgnOutput o = pgn_forward(random_input({8, 2}, rng), p);
  for (std::size_t i = 0; i < o.out.size(); ++i) {
    const double lo = std::min(o.hist[i], o.cand[i]);
    const double hi = std::max(o.hist[i], o.cand[i]);
    EXPECT_GE(o.out[i], lo - 1e-15);
    EXPECT_LE(o.out[i], hi + 1e-15);
  }
}

TEST(PgnTest, StepDependsOnlyOnPast) {
  Rng rng(5);
  PgnParams p = PgnParams::init(10, 1, 3, rng);
  randomize(p, rng);
  Tensor x = random_input({10, 1}, rng);
  const PgnOutput a = pgn_forward(x, p);
  x.mutable_values()[7] += 1.0;
  const PgnOutput b = pgn_forward(x, p);
  for (std::size_t t = 0; t < 10; ++t) {
    const bool same = bitwise_equal(slice(a.hist, 0, t, 1), slice(b.hist, 0, t, 1));
    EXPECT_EQ(same, t <= 7) << "t=" << t;
  }
}

TEST(PgnTest, GraphDepthIndependentOfLength) {
  Rng rng(6);
  const std::size_t short_depth = pgn_graph_depth(PgnParams::init(4, 1, 2, rng));
  const std::size_t long_depth = pgn_graph_depth(PgnParams::init(400, 1, 2, rng));
  EXPECT_GT(short_depth, 0u);
  EXPECT_EQ(short_depth, long_depth);
}

TEST(PgnTest, GradientsMatchFiniteDifferences) {
  Rng rng(7);
  PgnParams p = PgnParams::init(5, 2, 3, rng);
  randomize(p, rng);
  const Tensor x = random_input({2, 5, 2}, rng);
  PgnParams::visit(p, "", [&](const std::string& name, Tensor& slot) {
    const Tensor base = slot;
    const double err = finite_diff_check(
        [&](const Tensor& v) {
          PgnParams q = p;
          PgnParams::visit(q, "", [&](const std::string& n, Tensor& t) {
            if (n == name) t = v;
          });
          return sum_all(pgn_forward(x, q).out);
        },
        base);
    EXPECT_LT(err, 1e-7) << name;
  });
  EXPECT_LT(finite_diff_check([&](const Tensor& v) { return sum_all(pgn_forward(v, p).out); }, x),
            1e-7);
}

}  // namespace
}  // namespace tpgn
