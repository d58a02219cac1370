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

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "tpgn/checkpoint.hpp"
#include "tpgn/config.hpp"
#include "tpgn/data.hpp"
#include "tpgn/train.hpp"

namespace tpgn {

// Loads the CSV named by cfg.data, aggregates it hourly and splits it.
SplitWindows load_windows(const RunConfig& cfg);

struct TrainOutcome {
  std::filesystem::path dir;
  std::string hash;
  FitResult fit;
  Metrics test;           // in the units the model was trained on
  Metrics test_original;  // scaled back to the CSV's units
};

// Writes manifest.txt first, then checkpoint.tpgn, epoch_log.csv,
// metrics.csv and predictions.csv into a fresh run-<hash> directory.
// A diverged fit still writes its best checkpoint; check outcome.fit.diverged.
TrainOutcome run_train(const RunConfig& cfg, std::ostream* log = nullptr);

struct EvalOutcome {
  std::filesystem::path dir;
  Metrics test;
  Metrics test_original;
};

// Re-evaluates a checkpoint on the test split described by its own config
// echo, with `overrides` applied on top. Output goes to <out>/eval-<hash>.
EvalOutcome run_eval(const std::filesystem::path& checkpoint, const KeyValues& overrides,
                     std::ostream* log = nullptr);

// Finite-difference check of every parameter tensor of a freshly
// initialised model on one random batch; (name, max relative error) pairs.
std::vector<std::pair<std::string, double>> gradcheck_model(const ModelConfig& cfg,
                                                            std::uint64_t seed,
                                                            std::size_t batch = 2);

// "date,value" CSV of an hourly sinusoid.
void write_series_csv(const std::filesystem::path& path, const RawSeries& s);

// metrics.csv body shared by train and eval.
std::string format_metrics(const Metrics& scaled, const Metrics& original);

}  // namespace tpgn
