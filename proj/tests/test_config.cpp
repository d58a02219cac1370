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

#include "tpgn/config.hpp"
#include "tpgn/errors.hpp"

namespace tpgn {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("tpgn_config_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(KeyValuesTest, ParsesCommentsAndWhitespace) {
  const KeyValues kv = parse_key_values("# header\n lh = 96 \n\nvariant=long # trailing\n");
  ASSERT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv[0], (std::pair<std::string, std::string>{"lh", "96"}));
  EXPECT_EQ(kv[1].second, "long");
}

TEST(KeyValuesTest, Errors) {
  EXPECT_THROW(parse_key_values("lh 96\n"), ConfigError);
  EXPECT_THROW(parse_key_values("=3\n"), ConfigError);
  EXPECT_THROW(parse_key_values("lh=1\nlh=2\n"), ConfigError);
}

TEST(KeyValuesTest, FormatRoundTrip) {
  const KeyValues kv{{"a", "1"}, {"b", "x y"}};
  EXPECT_EQ(parse_key_values(format_key_values(kv)), kv);
}

TEST(RunConfigTest, Defaults) {
  const RunConfig cfg;
  EXPECT_EQ(cfg.model.history, 168u);
  EXPECT_EQ(cfg.model.period, 24u);
  EXPECT_EQ(cfg.train.seed, 2023u);
  EXPECT_EQ(cfg.train.batch_size, 32u);
  EXPECT_DOUBLE_EQ(cfg.train.lr, 1e-3);
}

TEST(RunConfigTest, ApplyKeys) {
  RunConfig cfg;
  cfg.apply({{"lh", "96"}, {"lf", "48"}, {"period", "12"}, {"dm", "8"}, {"norm", "0"},
             {"variant", "lstm"}, {"head_per_phase", "1"}, {"long_map", "full"},
             {"lr", "0.01"}, {"noise_eps", "0.05"}, {"data", "x.csv"}});
  EXPECT_EQ(cfg.model.history, 96u);
  EXPECT_EQ(cfg.model.horizon, 48u);
  EXPECT_EQ(cfg.model.period, 12u);
  EXPECT_EQ(cfg.model.d_model, 8u);
  EXPECT_FALSE(cfg.model.norm);
  EXPECT_EQ(cfg.model.variant.name(), "lstm");
  EXPECT_TRUE(cfg.model.head_per_phase);
  EXPECT_EQ(cfg.model.long_map, LongMap::kFull);
  EXPECT_DOUBLE_EQ(cfg.train.lr, 0.01);
  EXPECT_DOUBLE_EQ(cfg.train.noise_eps, 0.05);
  EXPECT_EQ(cfg.data, "x.csv");
}

TEST(RunConfigTest, BadValues) {
  RunConfig cfg;
  EXPECT_THROW(cfg.apply({{"norm", "2"}}), ConfigError);
  EXPECT_THROW(cfg.apply({{"lh", "-4"}}), ConfigError);
  EXPECT_THROW(cfg.apply({{"lr", "fast"}}), ConfigError);
  EXPECT_THROW(cfg.apply({{"colour", "blue"}}), ConfigError);
  EXPECT_THROW(cfg.apply({{"variant", "both"}}), ConfigError);
}

TEST(RunConfigTest, LaterAssignmentsWin) {
  RunConfig cfg;
  cfg.apply(parse_key_values("lh=96\ndm=8\n"));
  cfg.apply({{"dm", "16"}});
  EXPECT_EQ(cfg.model.history, 96u);
  EXPECT_EQ(cfg.model.d_model, 16u);
}

TEST(RunConfigTest, KeyValueRoundTrip) {
  RunConfig a;
  a.apply({{"lh", "96"}, {"lr", "0.0003"}, {"variant", "mlp"}, {"out", "elsewhere"}});
  RunConfig b;
  b.apply(a.to_key_values());
  EXPECT_EQ(a.to_key_values(), b.to_key_values());
  EXPECT_EQ(b.model, a.model);
}

TEST(ConfigHashTest, GitBlobHash) {
  EXPECT_EQ(git_blob_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(git_blob_hash("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST(ConfigHashTest, IgnoresOutputDirectory) {
  RunConfig a, b;
  b.out = "/somewhere/else";
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.train.seed = 7;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(ConfigHashTest, SpellingOfValuesDoesNotMatter) {
  RunConfig a, b;
  a.apply({{"lr", "0.001"}});
  b.apply({{"lr", "1e-3"}});
  EXPECT_EQ(config_hash(a), config_hash(b));
}

TEST(VersioningTest, FilesAndDirectories) {
  const fs::path dir = scratch("versions");
  const fs::path file = dir / "bench.csv";
  EXPECT_EQ(versioned_file(file), file);
  std::ofstream(file) << "x";
  EXPECT_EQ(versioned_file(file), dir / "bench.v2.csv");
  std::ofstream(dir / "bench.v2.csv") << "x";
  EXPECT_EQ(versioned_file(file), dir / "bench.v3.csv");

  const fs::path run = dir / "run-abc";
  EXPECT_EQ(versioned_dir(run), run);
  fs::create_directories(run);
  EXPECT_EQ(versioned_dir(run), dir / "run-abc-v2");
}

TEST(FormatDoubleTest, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.001), "0.001");
  EXPECT_EQ(format_double(2.0), "2");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_double(x)), x);
}

}  // namespace
}  // namespace tpgn
