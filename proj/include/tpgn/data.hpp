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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tpgn/random.hpp"
#include "tpgn/tensor.hpp"
#include "tpgn/tpgn_model.hpp"

namespace tpgn {

// Seconds since 1970-01-01 00:00 UTC.
using Timestamp = std::int64_t;

// Accepts "YYYY-MM-DD HH:MM[:SS[.fff]]" and RFC 3339 ("T" separator, "Z" or
// a +hh:mm offset, which is folded into UTC). A bare date means midnight.
Timestamp parse_datetime(std::string_view text);
std::string format_datetime(Timestamp ts);

struct RawSeries {
  std::vector<Timestamp> timestamps;
  std::vector<double> values;
  std::string target_name;
  std::size_t missing = 0;       // rows dropped for an empty or non-numeric target
  std::size_t interpolated = 0;  // hours filled by aggregate_hourly

  std::size_t size() const { return values.size(); }
  void validate() const;
};

// Rows whose target cell is empty, NaN or "NA" are skipped and counted in
// `missing`. Malformed timestamps, short rows and unsorted or repeated
// timestamps are DataErrors naming the offending line.
RawSeries load_csv(const std::filesystem::path& path, const std::string& target_column,
                   const std::string& timestamp_column = "date");
RawSeries parse_csv(std::string_view text, const std::string& target_column,
                    const std::string& timestamp_column = "date");

// Mean of the records in each clock hour; empty hours between the first and
// last record are linearly interpolated.
RawSeries aggregate_hourly(const RawSeries& s);

// hour/23, Monday-first weekday/6, (day-1)/30, (yearday-1)/365, each shifted
// by -0.5. Returns [N, 4].
inline constexpr std::size_t kTimeFeatures = 4;
Tensor make_time_features(std::span<const Timestamp> timestamps);

// Z-scoring applied to the whole series, fitted on the training split.
struct Scaler {
  double mean = 0.0;
  double std = 1.0;
  double apply(double v) const { return (v - mean) / std; }
};

struct SplitSpec {
  std::size_t history = 168;
  std::size_t horizon = 168;
  bool scale = true;
};

// One contiguous split with stride-1 windows generated on demand.
class WindowSet {
 public:
  WindowSet() = default;
  WindowSet(std::vector<double> values, std::vector<Timestamp> timestamps, std::size_t history,
            std::size_t horizon);

  std::size_t size() const;
  std::size_t history() const { return history_; }
  std::size_t horizon() const { return horizon_; }
  std::span<const double> values() const { return values_; }
  std::span<const Timestamp> timestamps() const { return timestamps_; }

  SeriesWindow window(std::size_t i) const;
  // Target timestamps of window i.
  std::vector<Timestamp> target_times(std::size_t i) const;

  struct Batch {
    Tensor history;        // [B, L_h]
    Tensor time_features;  // [B, L_h, 4]
    Tensor target;         // [B, L_f]
  };
  Batch batch(std::span<const std::size_t> indices) const;

 private:
  std::vector<double> values_;
  std::vector<Timestamp> timestamps_;
  std::vector<double> features_;  // [N, 4]
  std::size_t history_ = 0;
  std::size_t horizon_ = 0;
};

struct SplitWindows {
  WindowSet train, val, test;
  Scaler scaler;
  std::size_t train_len = 0, val_len = 0, test_len = 0;
};

// Contiguous 6:2:2 split (floor for train and val, remainder to test).
SplitWindows split_and_window(const RawSeries& s, const SplitSpec& spec);

// Picks floor(epsilon * n) distinct positions and adds Uniform(-2x, 2x) to
// each. Returns the number of perturbed positions.
std::size_t inject_noise(std::span<double> x, double epsilon, Rng& rng);

// Hourly series with value amplitude * sin(2 pi t / (period * (1 + drift))).
RawSeries make_sinusoid(std::size_t length, std::size_t period, double drift = 0.0,
                        double amplitude = 1.0);

}  // namespace tpgn
