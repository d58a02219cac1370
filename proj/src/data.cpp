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

#include "tpgn/data.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "tpgn/errors.hpp"

namespace tpgn {

namespace {

namespace chr = std::chrono;

constexpr Timestamp kHour = 3600;
constexpr Timestamp kDay = 86400;

bool read_int(std::string_view text, std::size_t& pos, std::size_t digits, int& out) {
  if (pos + digits > text.size()) return false;
  const char* first = text.data() + pos;
  const auto [ptr, ec] = std::from_chars(first, first + digits, out);
  if (ec != std::errc() || ptr != first + digits) return false;
  pos += digits;
  return true;
}

bool expect(std::string_view text, std::size_t& pos, char c) {
  if (pos >= text.size() || text[pos] != c) return false;
  ++pos;
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == ',' && !quoted) {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  out.push_back(trim(line.substr(start)));
  return out;
}

bool is_missing(std::string_view v) {
  return v.empty() || v == "NaN" || v == "nan" || v == "NA" || v == "null";
}

chr::year_month_day civil(Timestamp ts) {
  const Timestamp days = ts >= 0 ? ts / kDay : -((-ts + kDay - 1) / kDay);
  return chr::year_month_day{chr::sys_days{chr::days{days}}};
}

}  // namespace

Timestamp parse_datetime(std::string_view text) {
  text = trim(text);
  const auto fail = [&]() -> Timestamp {
    throw DataError("unparseable datetime '" + std::string(text) + "'");
  };
  std::size_t pos = 0;
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  if (!read_int(text, pos, 4, year) || !expect(text, pos, '-') || !read_int(text, pos, 2, month) ||
      !expect(text, pos, '-') || !read_int(text, pos, 2, day)) {
    return fail();
  }
  Timestamp offset = 0;
  if (pos < text.size()) {
    if (text[pos] != ' ' && text[pos] != 'T' && text[pos] != 't') return fail();
    ++pos;
    if (!read_int(text, pos, 2, hour) || !expect(text, pos, ':') || !read_int(text, pos, 2, minute)) {
      return fail();
    }
    if (pos < text.size() && text[pos] == ':') {
      ++pos;
      if (!read_int(text, pos, 2, second)) return fail();
      if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      }
    }
    if (pos < text.size()) {
      const char z = text[pos];
      if (z == 'Z' || z == 'z') {
        ++pos;
      } else if (z == '+' || z == '-') {
        ++pos;
        int oh = 0, om = 0;
        if (!read_int(text, pos, 2, oh) || !expect(text, pos, ':') || !read_int(text, pos, 2, om)) {
          return fail();
        }
        offset = (z == '+' ? 1 : -1) * (oh * kHour + om * 60);
      }
    }
    if (pos != text.size()) return fail();
  }
  const chr::year_month_day ymd{chr::year{year}, chr::month{static_cast<unsigned>(month)},
                                chr::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) return fail();
  const Timestamp days = chr::sys_days{ymd}.time_since_epoch().count();
  return days * kDay + hour * kHour + minute * 60 + second - offset;
}

std::string format_datetime(Timestamp ts) {
  const chr::year_month_day ymd = civil(ts);
  const Timestamp rem = ts - chr::sys_days{ymd}.time_since_epoch().count() * kDay;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(rem / kHour), static_cast<int>(rem % kHour / 60),
                static_cast<int>(rem % 60));
  return buf;
}

void RawSeries::validate() const {
  if (timestamps.size() != values.size()) {
    throw DataError("series has " + std::to_string(timestamps.size()) + " timestamps but " +
                    std::to_string(values.size()) + " values");
  }
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (timestamps[i] <= timestamps[i - 1]) {
      throw DataError("timestamps not strictly increasing at " + format_datetime(timestamps[i]));
    }
  }
}

RawSeries parse_csv(std::string_view text, const std::string& target_column,
                    const std::string& timestamp_column) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    while (pos < text.size()) {
      const std::size_t end = std::min(text.find('\n', pos), text.size());
      line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (!trim(line).empty()) return true;
    }
    return false;
  };

  std::string_view line;
  if (!next_line(line)) throw DataError("CSV is empty");
  if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
  const auto header = split_fields(line);
  const auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("CSV has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ts_col = column(timestamp_column);
  const std::size_t y_col = column(target_column);

  RawSeries s;
  s.target_name = target_column;
  std::map<Timestamp, std::size_t> seen_at;
  while (next_line(line)) {
    const auto fields = split_fields(line);
    const std::string where = "line " + std::to_string(line_no);
    if (fields.size() != header.size()) {
      throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    Timestamp ts;
    try {
      ts = parse_datetime(fields[ts_col]);
    } catch (const DataError& e) {
      throw DataError(where + ", column '" + timestamp_column + "': " + e.what());
    }
    if (const auto it = seen_at.find(ts); it != seen_at.end()) {
      throw DataError(where + ": duplicate timestamp " + std::string(fields[ts_col]) +
                      " (first seen on line " + std::to_string(it->second) + ")");
    }
    if (!s.timestamps.empty() && ts < s.timestamps.back()) {
      throw DataError(where + ": timestamp " + std::string(fields[ts_col]) +
                      " is earlier than the previous row");
    }
    seen_at.emplace(ts, line_no);
    const std::string_view cell = fields[y_col];
    if (is_missing(cell)) {
      ++s.missing;
      continue;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw DataError(where + ", column '" + target_column + "': cannot parse '" +
                      std::string(cell) + "' as a number");
    }
    if (!std::isfinite(v)) {
      ++s.missing;
      continue;
    }
    s.timestamps.push_back(ts);
    s.values.push_back(v);
  }
  return s;
}

RawSeries load_csv(const std::filesystem::path& path, const std::string& target_column,
                   const std::string& timestamp_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open data file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str(), target_column, timestamp_column);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

RawSeries aggregate_hourly(const RawSeries& s) {
  s.validate();
  RawSeries out;
  out.target_name = s.target_name;
  out.missing = s.missing;
  if (s.values.empty()) return out;
  const auto bucket_of = [](Timestamp ts) {
    return ts >= 0 ? ts / kHour : -((-ts + kHour - 1) / kHour);
  };
  const Timestamp first = bucket_of(s.timestamps.front());
  const Timestamp last = bucket_of(s.timestamps.back());
  const std::size_t n = static_cast<std::size_t>(last - first + 1);
  std::vector<double> sum(n, 0.0);
  std::vector<std::size_t> count(n, 0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::size_t b = static_cast<std::size_t>(bucket_of(s.timestamps[i]) - first);
    sum[b] += s.values[i];
    ++count[b];
  }
  out.timestamps.resize(n);
  out.values.resize(n);
  std::size_t prev = 0;  // last filled bucket; bucket 0 is always filled
  for (std::size_t b = 0; b < n; ++b) {
    out.timestamps[b] = (first + static_cast<Timestamp>(b)) * kHour;
    if (count[b] == 0) continue;
    out.values[b] = sum[b] / static_cast<double>(count[b]);
    for (std::size_t g = prev + 1; g < b; ++g) {
      const double w = static_cast<double>(g - prev) / static_cast<double>(b - prev);
      out.values[g] = out.values[prev] + w * (out.values[b] - out.values[prev]);
      ++out.interpolated;
    }
    prev = b;
  }
  return out;
}

Tensor make_time_features(std::span<const Timestamp> timestamps) {
  std::vector<double> f(timestamps.size() * kTimeFeatures);
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    const Timestamp ts = timestamps[i];
    const chr::sys_days day{civil(ts)};
    const Timestamp since_midnight = ts - day.time_since_epoch().count() * kDay;
    const chr::year_month_day ymd{day};
    const unsigned weekday = chr::weekday{day}.iso_encoding() - 1;  // Monday = 0
    const auto yday =
        (day - chr::sys_days{ymd.year() / chr::January / 1}).count();  // Jan 1 = 0
    double* row = f.data() + i * kTimeFeatures;
    row[0] = static_cast<double>(since_midnight / kHour) / 23.0 - 0.5;
    row[1] = static_cast<double>(weekday) / 6.0 - 0.5;
    row[2] = static_cast<double>(static_cast<unsigned>(ymd.day()) - 1) / 30.0 - 0.5;
    row[3] = static_cast<double>(yday) / 365.0 - 0.5;
  }
  return Tensor({timestamps.size(), kTimeFeatures}, std::move(f));
}

WindowSet::WindowSet(std::vector<double> values, std::vector<Timestamp> timestamps,
                     std::size_t history, std::size_t horizon)
    : values_(std::move(values)),
      timestamps_(std::move(timestamps)),
      history_(history),
      horizon_(horizon) {
  if (values_.size() != timestamps_.size()) {
    throw DataError("window set values and timestamps differ in length");
  }
  const Tensor f = make_time_features(timestamps_);
  features_.assign(f.values().begin(), f.values().end());
}

std::size_t WindowSet::size() const {
  const std::size_t span = history_ + horizon_;
  return values_.size() >= span ? values_.size() - span + 1 : 0;
}

SeriesWindow WindowSet::window(std::size_t i) const {
  if (i >= size()) {
    throw ContractError("window " + std::to_string(i) + " out of range (" +
                        std::to_string(size()) + " windows)");
  }
  const double* x = values_.data() + i;
  const double* f = features_.data() + i * kTimeFeatures;
  SeriesWindow w;
  w.history = Tensor({history_}, std::vector<double>(x, x + history_));
  w.time_features = Tensor({history_, kTimeFeatures},
                           std::vector<double>(f, f + history_ * kTimeFeatures));
  w.target = Tensor({horizon_}, std::vector<double>(x + history_, x + history_ + horizon_));
  return w;
}

std::vector<Timestamp> WindowSet::target_times(std::size_t i) const {
  if (i >= size()) throw ContractError("window index out of range");
  const auto first = timestamps_.begin() + static_cast<std::ptrdiff_t>(i + history_);
  return {first, first + static_cast<std::ptrdiff_t>(horizon_)};
}

WindowSet::Batch WindowSet::batch(std::span<const std::size_t> indices) const {
  const std::size_t b = indices.size();
  std::vector<double> hist(b * history_), feat(b * history_ * kTimeFeatures), tgt(b * horizon_);
  for (std::size_t k = 0; k < b; ++k) {
    const std::size_t i = indices[k];
    if (i >= size()) throw ContractError("window index out of range");
    std::copy_n(values_.data() + i, history_, hist.data() + k * history_);
    std::copy_n(features_.data() + i * kTimeFeatures, history_ * kTimeFeatures,
                feat.data() + k * history_ * kTimeFeatures);
    std::copy_n(values_.data() + i + history_, horizon_, tgt.data() + k * horizon_);
  }
  return {Tensor({b, history_}, std::move(hist)),
          Tensor({b, history_, kTimeFeatures}, std::move(feat)),
          Tensor({b, horizon_}, std::move(tgt))};
}

SplitWindows split_and_window(const RawSeries& s, const SplitSpec& spec) {
  s.validate();
  if (spec.history == 0 || spec.horizon == 0) {
    throw ConfigError("history and horizon must be positive");
  }
  const std::size_t n = s.size();
  SplitWindows out;
  out.train_len = n * 6 / 10;
  out.val_len = n * 2 / 10;
  out.test_len = n - out.train_len - out.val_len;
  const std::size_t need = spec.history + spec.horizon;
  const std::pair<const char*, std::size_t> parts[] = {
      {"train", out.train_len}, {"validation", out.val_len}, {"test", out.test_len}};
  for (const auto& [name, len] : parts) {
    if (len < need) {
      throw ConfigError(std::string(name) + " split has " + std::to_string(len) +
                        " steps but one window needs " + std::to_string(need) + " (series length " +
                        std::to_string(n) + ")");
    }
  }

  if (spec.scale) {
    double sum = 0.0;
    for (std::size_t i = 0; i < out.train_len; ++i) sum += s.values[i];
    out.scaler.mean = sum / static_cast<double>(out.train_len);
    double sq = 0.0;
    for (std::size_t i = 0; i < out.train_len; ++i) {
      sq += (s.values[i] - out.scaler.mean) * (s.values[i] - out.scaler.mean);
    }
    out.scaler.std = std::sqrt(sq / static_cast<double>(out.train_len));
    if (out.scaler.std == 0.0) out.scaler.std = 1.0;
  }
  const auto make = [&](std::size_t begin, std::size_t len) {
    std::vector<double> v(len);
    for (std::size_t i = 0; i < len; ++i) v[i] = out.scaler.apply(s.values[begin + i]);
    std::vector<Timestamp> t(s.timestamps.begin() + static_cast<std::ptrdiff_t>(begin),
                             s.timestamps.begin() + static_cast<std::ptrdiff_t>(begin + len));
    return WindowSet(std::move(v), std::move(t), spec.history, spec.horizon);
  };
  out.train = make(0, out.train_len);
  out.val = make(out.train_len, out.val_len);
  out.test = make(out.train_len + out.val_len, out.test_len);
  return out;
}

std::size_t inject_noise(std::span<double> x, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ConfigError("noise epsilon must lie in [0, 1], got " + std::to_string(epsilon));
  }
  const auto k = static_cast<std::size_t>(std::floor(epsilon * static_cast<double>(x.size())));
  if (k == 0) return 0;
  std::vector<std::size_t> idx(x.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  // Partial Fisher-Yates: the first k slots are a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  for (std::size_t i = 0; i < k; ++i) {
    double& v = x[idx[i]];
    const double bound = 2.0 * std::abs(v);
    const double u = rng.uniform(-bound, bound);
    v += u;
  }
  return k;
}

RawSeries make_sinusoid(std::size_t length, std::size_t period, double drift, double amplitude) {
  if (period == 0) throw ConfigError("period must be positive");
  RawSeries s;
  s.target_name = "value";
  s.timestamps.resize(length);
  s.values.resize(length);
  const Timestamp start = parse_datetime("2016-07-01 00:00:00");
  const double w = 2.0 * M_PI / (static_cast<double>(period) * (1.0 + drift));
  for (std::size_t t = 0; t < length; ++t) {
    s.timestamps[t] = start + static_cast<Timestamp>(t) * kHour;
    s.values[t] = amplitude * std::sin(w * static_cast<double>(t));
  }
  return s;
}

}  // namespace tpgn
