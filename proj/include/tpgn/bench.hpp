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
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tpgn {

enum class BenchModel { kTpgn, kPgnRaw, kGruSeq, kLstmSeq };
enum class BenchMode { kTrainStep, kForward };

std::string_view bench_model_name(BenchModel m);
BenchModel parse_bench_model(std::string_view name);

struct BenchScenario {
  BenchModel model = BenchModel::kTpgn;
  std::size_t history = 168;
  std::size_t horizon = 168;
  std::size_t d_model = 128;
  std::size_t batch = 32;
  std::size_t layers = 1;
  std::size_t period = 24;  // TPGN only
  std::size_t repeats = 3;
  std::size_t warmup = 1;
  BenchMode mode = BenchMode::kTrainStep;
  std::uint64_t seed = 2023;

  void validate() const;
};

struct BenchRecord {
  BenchScenario scenario;
  bool ok = false;
  std::string error;
  double time_ms_median = 0.0;
  std::vector<double> times_ms;
  std::size_t peak_bytes = 0;
  std::uint64_t macs = 0;         // one forward pass over the whole batch
  std::uint64_t measured_macs = 0;  // kernel counter over one timed repetition
  std::size_t graph_depth = 0;
};

// Warmups, then `repeats` timed runs on synthetic data. Allocation failures
// produce a record with ok == false.
BenchRecord run_scenario(const BenchScenario& s);

inline constexpr std::string_view kBenchHeader =
    "model,L_h,L_f,d_m,batch,time_ms_median,peak_bytes,macs,graph_depth";

void write_bench_csv(std::ostream& out, std::span<const BenchRecord> records);

// Runs scenarios one after another, writing the CSV to a fresh versioned file
// (bench.csv, bench.v2.csv, ...) under `dir`. Returns the path written.
std::filesystem::path sweep(std::span<const BenchScenario> scenarios,
                            const std::filesystem::path& dir, std::vector<BenchRecord>* records = nullptr,
                            std::ostream* progress = nullptr);

// Output-length sweep at L_h = 168 and input-length sweep at L_f = 1440.
std::vector<BenchScenario> default_sweep(BenchMode mode, std::size_t repeats);

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace tpgn
