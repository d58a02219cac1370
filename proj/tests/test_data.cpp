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
#include <string>

#include "tpgn/data.hpp"
#include "tpgn/errors.hpp"

namespace tpgn {
namespace {

std::string error_of(const std::string& csv, const std::string& target = "OT") {
  try {
    parse_csv(csv, target);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

TEST(DatetimeTest, ParsesCommonForms) {
  EXPECT_EQ(parse_datetime("1970-01-01 00:00:00"), 0);
  EXPECT_EQ(parse_datetime("1970-01-02"), 86400);
  EXPECT_EQ(parse_datetime("1970-01-01T01:30"), 5400);
  EXPECT_EQ(parse_datetime("1970-01-01T02:00:00+01:00"), 3600);
  EXPECT_EQ(parse_datetime("2016-07-01 00:00:00Z"), 1467331200);
  EXPECT_THROW(parse_datetime("2016-13-01"), DataError);
  EXPECT_THROW(parse_datetime("yesterday"), DataError);
}

TEST(DatetimeTest, FormatRoundTrip) {
  const Timestamp ts = parse_datetime("2018-02-20 23:00:00");
  EXPECT_EQ(parse_datetime(format_datetime(ts)), ts);
}

TEST(CsvTest, WellFormed) {
  const RawSeries s = parse_csv(
      "date,HUFL,OT\n"
      "2016-07-01 00:00:00,5.8,30.5\n"
      "2016-07-01 01:00:00,5.6,27.7\n"
      "2016-07-01 02:00:00,5.7,27.7\n",
      "OT");
  EXPECT_EQ(s.size(), 3u);
  EXPECT_DOUBLE_EQ(s.values[0], 30.5);
  EXPECT_EQ(s.timestamps[1] - s.timestamps[0], 3600);
  EXPECT_EQ(s.target_name, "OT");
}

TEST(CsvTest, HandlesBomQuotesAndCrlf) {
  const RawSeries s = parse_csv("\xEF\xBB\xBF\"date\",\"OT\"\r\n\"2020-01-01 00:00\",\"1.5\"\r\n", "OT");
  ASSERT_EQ(s.size(), 1u);
  EXPECT_DOUBLE_EQ(s.values[0], 1.5);
}

TEST(CsvTest, MissingColumnNamed) {
  EXPECT_NE(error_of("date,HUFL\n2016-07-01,1\n").find("'OT'"), std::string::npos);
}

TEST(CsvTest, DuplicateTimestampNamed) {
  const std::string msg = error_of(
      "date,OT\n2016-07-01 00:00:00,1\n2016-07-01 01:00:00,2\n2016-07-01 01:00:00,3\n");
  EXPECT_NE(msg.find("duplicate timestamp 2016-07-01 01:00:00"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;
}

TEST(CsvTest, OtherErrors) {
  EXPECT_NE(error_of("").find("empty"), std::string::npos);
  EXPECT_NE(error_of("date,OT\n2016-07-01,abc\n").find("abc"), std::string::npos);
  EXPECT_NE(error_of("date,OT\n2016-07-01\n").find("fields"), std::string::npos);
  EXPECT_FALSE(error_of("date,OT\n2016-07-02,1\n2016-07-01,2\n").empty());
}

TEST(CsvTest, MissingTargetsCounted) {
  const RawSeries s =
      parse_csv("date,OT\n2016-07-01 00:00,1\n2016-07-01 01:00,\n2016-07-01 02:00,NaN\n"
                "2016-07-01 03:00,4\n",
                "OT");
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.missing, 2u);
}

TEST(CsvTest, LoadMissingFile) {
  EXPECT_THROW(load_csv("/nonexistent/data.csv", "OT"), DataError);
}

TEST(AggregateTest, QuarterHoursAveraged) {
  const RawSeries s = parse_csv(
      "date,OT\n2016-07-01 00:00,1\n2016-07-01 00:15,2\n2016-07-01 00:30,3\n"
      "2016-07-01 00:45,4\n",
      "OT");
  const RawSeries h = aggregate_hourly(s);
  ASSERT_EQ(h.size(), 1u);
  EXPECT_DOUBLE_EQ(h.values[0], 2.5);
  EXPECT_EQ(h.timestamps[0], parse_datetime("2016-07-01 00:00"));
}

TEST(AggregateTest, HourlyUnchanged) {
  const RawSeries s =
      parse_csv("date,OT\n2016-07-01 00:00,1\n2016-07-01 01:00,5\n2016-07-01 02:00,2\n", "OT");
  const RawSeries h = aggregate_hourly(s);
  EXPECT_EQ(h.values, s.values);
  EXPECT_EQ(h.timestamps, s.timestamps);
  EXPECT_EQ(h.interpolated, 0u);
}

TEST(AggregateTest, GapInterpolated) {
  const RawSeries s = parse_csv("date,OT\n2016-07-01 00:00,1\n2016-07-01 02:00,3\n", "OT");
  const RawSeries h = aggregate_hourly(s);
  EXPECT_EQ(h.values, (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(h.interpolated, 1u);
}

TEST(TimeFeaturesTest, Endpoints) {
  // 2018-01-01 was a Monday.
  const std::vector<Timestamp> ts{parse_datetime("2018-01-01 00:00"),
                                  parse_datetime("2018-01-07 23:00"),
                                  parse_datetime("2018-12-31 12:00")};
  const Tensor f = make_time_features(ts);
  EXPECT_EQ(f.shape(), (Shape{3, 4}));
  EXPECT_DOUBLE_EQ(f.at({0, 0}), -0.5);  // hour
  EXPECT_DOUBLE_EQ(f.at({0, 1}), -0.5);  // Monday
  EXPECT_DOUBLE_EQ(f.at({0, 2}), -0.5);  // day of month
  EXPECT_DOUBLE_EQ(f.at({0, 3}), -0.5);  // Jan 1
  EXPECT_DOUBLE_EQ(f.at({1, 0}), 0.5);
  EXPECT_DOUBLE_EQ(f.at({1, 1}), 0.5);  // Sunday
  for (double v : f.values()) {
    EXPECT_GE(v, -0.5);
    EXPECT_LE(v, 0.5);
  }
}

RawSeries hourly(std::vector<double> values) {
  RawSeries s;
  s.target_name = "v";
  s.values = std::move(values);
  for (std::size_t i = 0; i < s.values.size(); ++i) s.timestamps.push_back(static_cast<Timestamp>(i) * 3600);
  return s;
}

TEST(SplitTest, SixTwoTwo) {
  const SplitWindows w = split_and_window(hourly(std::vector<double>(10, 1.0)), {1, 1, false});
  EXPECT_EQ(w.train_len, 6u);
  EXPECT_EQ(w.val_len, 2u);
  EXPECT_EQ(w.test_len, 2u);
}

TEST(SplitTest, WindowCountAndContent) {
  const WindowSet ws({1, 2, 3, 4, 5, 6}, {0, 3600, 7200, 10800, 14400, 18000}, 2, 1);
  EXPECT_EQ(ws.size(), 4u);
  const SeriesWindow first = ws.window(0);
  EXPECT_EQ(first.history.to_vector(), (std::vector<double>{1, 2}));
  EXPECT_EQ(first.target.to_vector(), (std::vector<double>{3}));
  EXPECT_EQ(first.time_features.shape(), (Shape{2, 4}));
  EXPECT_THROW(ws.window(4), ContractError);
  const std::vector<std::size_t> idx{3, 0};
  const WindowSet::Batch b = ws.batch(idx);
  EXPECT_EQ(b.history.to_vector(), (std::vector<double>{4, 5, 1, 2}));
  EXPECT_EQ(b.target.to_vector(), (std::vector<double>{6, 3}));
}

TEST(SplitTest, TooShortIsConfigError) {
  EXPECT_THROW(split_and_window(hourly(std::vector<double>(20, 1.0)), {4, 4, false}),
               ConfigError);
}

TEST(SplitTest, ScalerFitOnTrainOnly) {
  std::vector<double> v(10, 0.0);
  for (std::size_t i = 6; i < 10; ++i) v[i] = 100.0;  // val/test differ
  v[0] = 6.0;
  const SplitWindows w = split_and_window(hourly(v), {1, 1, true});
  EXPECT_DOUBLE_EQ(w.scaler.mean, 1.0);
  EXPECT_DOUBLE_EQ(w.scaler.std, std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(w.val.values()[0], 99.0 / std::sqrt(5.0));
}

TEST(NoiseTest, ZeroEpsilonIsIdentity) {
  std::vector<double> x{1, 2, 3};
  Rng rng(1);
  EXPECT_EQ(inject_noise(x, 0.0, rng), 0u);
  EXPECT_EQ(x, (std::vector<double>{1, 2, 3}));
}

TEST(NoiseTest, ZeroValuesStayZero) {
  std::vector<double> x(50, 0.0);
  Rng rng(2);
  EXPECT_EQ(inject_noise(x, 1.0, rng), 50u);
  for (double v : x) EXPECT_EQ(v, 0.0);
}

TEST(NoiseTest, FullEpsilonStaysInInterval) {
  Rng rng(3);
  std::vector<double> x(200);
  for (double& v : x) v = rng.uniform(0.1, 5.0);
  const std::vector<double> orig = x;
  EXPECT_EQ(inject_noise(x, 1.0, rng), 200u);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_GE(x[i], -orig[i]);
    EXPECT_LE(x[i], 3 * orig[i]);
  }
}

TEST(NoiseTest, PerturbsFloorOfFraction) {
  Rng rng(4);
  std::vector<double> x(37, 1.0);
  EXPECT_EQ(inject_noise(x, 0.1, rng), 3u);
  std::size_t changed = 0;
  for (double v : x) changed += v != 1.0;
  EXPECT_LE(changed, 3u);
  EXPECT_THROW(inject_noise(x, 1.5, rng), ConfigError);
  EXPECT_THROW(inject_noise(x, -0.1, rng), ConfigError);
}

TEST(SinusoidTest, PeriodicWithoutDrift) {
  const RawSeries s = make_sinusoid(96, 24);
  ASSERT_EQ(s.size(), 96u);
  for (std::size_t i = 0; i + 24 < s.size(); ++i) EXPECT_NEAR(s.values[i], s.values[i + 24], 1e-12);
  EXPECT_EQ(s.timestamps[1] - s.timestamps[0], 3600);
}

}  // namespace
}  // namespace tpgn
