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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tpgn/bench.hpp"
#include "tpgn/errors.hpp"

namespace tpgn {
namespace {

namespace fs = std::filesystem;

BenchScenario tiny(BenchModel m) {
  BenchScenario s;
  s.model = m;
  s.history = 16;
  s.horizon = 8;
  s.period = 4;
  s.d_model = 4;
  s.batch = 2;
  return s;
}

TEST(BenchTest, ModelNames) {
  for (BenchModel m : {BenchModel::kTpgn, BenchModel::kPgnRaw, BenchModel::kGruSeq,
                       BenchModel::kLstmSeq}) {
    EXPECT_EQ(parse_bench_model(bench_model_name(m)), m);
  }
  EXPECT_THROW(parse_bench_model("RNN"), ConfigError);
}

TEST(BenchTest, ScenarioValidation) {
  BenchScenario s = tiny(BenchModel::kTpgn);
  EXPECT_NO_THROW(s.validate());
  s.repeats = 2;
  EXPECT_THROW(s.validate(), ConfigError);
  s = tiny(BenchModel::kTpgn);
  s.history = 18;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(BenchTest, RunsEveryModelInBothModes) {
  for (BenchModel m : {BenchModel::kTpgn, BenchModel::kPgnRaw, BenchModel::kGruSeq,
                       BenchModel::kLstmSeq}) {
    for (BenchMode mode : {BenchMode::kTrainStep, BenchMode::kForward}) {
      BenchScenario s = tiny(m);
      s.mode = mode;
      const BenchRecord r = run_scenario(s);
      ASSERT_TRUE(r.ok) << bench_model_name(m) << ": " << r.error;
      EXPECT_EQ(r.times_ms.size(), 3u);
      EXPECT_GT(r.macs, 0u);
      EXPECT_GT(r.peak_bytes, 0u);
      EXPECT_GT(r.graph_depth, 0u);
      if (mode == BenchMode::kForward) {
        EXPECT_EQ(r.measured_macs, r.macs);
      }
    }
  }
}

TEST(BenchTest, RecurrentDepthGrowsTpgnDepthDoesNot) {
  BenchScenario a = tiny(BenchModel::kTpgn), b = a;
  b.history = 64;
  EXPECT_EQ(run_scenario(a).graph_depth, run_scenario(b).graph_depth);
  BenchScenario g = tiny(BenchModel::kGruSeq);
  EXPECT_GE(run_scenario(g).graph_depth, g.history);
}

TEST(BenchTest, CsvSchema) {
  BenchRecord ok;
  ok.scenario = tiny(BenchModel::kGruSeq);
  ok.ok = true;
  ok.time_ms_median = 1.5;
  ok.peak_bytes = 1024;
  ok.macs = 99;
  ok.graph_depth = 40;
  BenchRecord failed;
  failed.scenario = tiny(BenchModel::kLstmSeq);
  failed.error = "out of memory";
  std::ostringstream out;
  const BenchRecord recs[] = {ok, failed};
  write_bench_csv(out, recs);
  std::istringstream in(out.str());
  std::string header, row1, row2;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  EXPECT_EQ(header, kBenchHeader);
  EXPECT_EQ(row1, "GRU-seq,16,8,4,2,1.5,1024,99,40");
  EXPECT_EQ(row2, "LSTM-seq,16,8,4,2,NA,NA,NA,NA");
}

TEST(BenchTest, SweepVersionsOutput) {
  const fs::path dir = fs::temp_directory_path() / "tpgn_bench_sweep";
  fs::remove_all(dir);
  const std::vector<BenchScenario> scenarios{tiny(BenchModel::kTpgn)};
  std::vector<BenchRecord> records;
  const fs::path first = sweep(scenarios, dir, &records);
  const fs::path second = sweep(scenarios, dir);
  EXPECT_EQ(first.filename(), "bench.csv");
  EXPECT_EQ(second.filename(), "bench.v2.csv");
  ASSERT_EQ(records.size(), 1u);
  std::ifstream in(first);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, kBenchHeader);
  fs::remove_all(dir);
}

TEST(BenchTest, DefaultSweepCoversGrid) {
  const auto s = default_sweep(BenchMode::kTrainStep, 3);
  EXPECT_EQ(s.size(), 7u * 4u);
  for (const BenchScenario& sc : s) EXPECT_NO_THROW(sc.validate());
}

TEST(BenchTest, LogLogSlope) {
  const std::vector<double> x{1, 2, 4, 8}, y{3, 12, 48, 192};
  EXPECT_NEAR(loglog_slope(x, y), 2.0, 1e-12);
}

}  // namespace
}  // namespace tpgn
