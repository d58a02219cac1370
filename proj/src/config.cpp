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

#include "tpgn/config.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "tpgn/errors.hpp"

namespace tpgn {

namespace {

std::string_view strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a finite number, got '" + v + "'");
  }
  return out;
}

bool to_flag(const std::string& key, const std::string& v) {
  if (v == "0") return false;
  if (v == "1") return true;
  throw ConfigError(key + ": expected 0 or 1, got '" + v + "'");
}

}  // namespace

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value, got '" +
                        std::string(line) + "'");
    }
    std::string key(strip(line.substr(0, eq)));
    std::string value(strip(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": key '" + key + "' repeated");
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_key_values(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string format_key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

void RunConfig::apply(const KeyValues& kv) {
  for (const auto& [key, v] : kv) {
    if (key == "data") data = v;
    else if (key == "target") target = v;
    else if (key == "timestamp_column") timestamp_column = v;
    else if (key == "out") out = v;
    else if (key == "lh") model.history = to_size(key, v);
    else if (key == "lf") model.horizon = to_size(key, v);
    else if (key == "period") model.period = to_size(key, v);
    else if (key == "dm") model.d_model = to_size(key, v);
    else if (key == "norm") model.norm = to_flag(key, v);
    else if (key == "variant") model.variant = TpgnVariant::parse(v);
    else if (key == "head_per_phase") model.head_per_phase = to_flag(key, v);
    else if (key == "long_map") {
      if (v == "shared") model.long_map = LongMap::kShared;
      else if (v == "full") model.long_map = LongMap::kFull;
      else throw ConfigError("long_map: expected shared or full, got '" + v + "'");
    }
    else if (key == "scale") scale = to_flag(key, v);
    else if (key == "seed") train.seed = to_size(key, v);
    else if (key == "lr") train.lr = to_double(key, v);
    else if (key == "batch_size") train.batch_size = to_size(key, v);
    else if (key == "max_epochs") train.max_epochs = to_size(key, v);
    else if (key == "patience") train.patience = to_size(key, v);
    else if (key == "max_steps") train.max_steps = to_size(key, v);
    else if (key == "noise_eps") train.noise_eps = to_double(key, v);
    else throw ConfigError("unknown config key '" + key + "'");
  }
}

void RunConfig::validate() const {
  model.validate();
  train.validate();
  if (target.empty()) throw ConfigError("target column name is empty");
}

KeyValues RunConfig::identity() const {
  return {
      {"data", data},
      {"target", target},
      {"timestamp_column", timestamp_column},
      {"scale", scale ? "1" : "0"},
      {"lh", std::to_string(model.history)},
      {"lf", std::to_string(model.horizon)},
      {"period", std::to_string(model.period)},
      {"dm", std::to_string(model.d_model)},
      {"norm", model.norm ? "1" : "0"},
      {"variant", model.variant.name()},
      {"head_per_phase", model.head_per_phase ? "1" : "0"},
      {"long_map", model.long_map == LongMap::kShared ? "shared" : "full"},
      {"seed", std::to_string(train.seed)},
      {"lr", format_double(train.lr)},
      {"batch_size", std::to_string(train.batch_size)},
      {"max_epochs", std::to_string(train.max_epochs)},
      {"patience", std::to_string(train.patience)},
      {"max_steps", std::to_string(train.max_steps)},
      {"noise_eps", format_double(train.noise_eps)},
  };
}

KeyValues RunConfig::to_key_values() const {
  KeyValues kv = identity();
  kv.emplace_back("out", out);
  return kv;
}

std::string git_blob_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  std::string buf = header;
  buf.append(content);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(buf.data(), buf.size(), digest, &len, EVP_sha1(), nullptr) != 1) {
    throw Error("SHA-1 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    const unsigned char b = digest[i];
    out += kHex[b >> 4];
    out += kHex[b & 15];
  }
  return out;
}

std::filesystem::path versioned_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return path;
  for (std::size_t v = 2;; ++v) {
    std::filesystem::path candidate = path;
    candidate.replace_filename(path.stem().string() + ".v" + std::to_string(v) +
                               path.extension().string());
    if (!std::filesystem::exists(candidate)) return candidate;
  }
}

std::filesystem::path versioned_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::exists(dir)) return dir;
  for (std::size_t v = 2;; ++v) {
    std::filesystem::path candidate = dir;
    candidate += "-v" + std::to_string(v);
    if (!std::filesystem::exists(candidate)) return candidate;
  }
}

std::string config_hash(const RunConfig& cfg) {
  return git_blob_hash(format_key_values(cfg.identity()));
}

}  // namespace tpgn
