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

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tpgn/tpgn_model.hpp"
#include "tpgn/train.hpp"

namespace tpgn {

// Ordered key=value pairs.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Flat text format: one key=value per line, '#' starts a comment, blank lines
// are ignored. Repeated keys and lines without '=' are ConfigErrors.
KeyValues parse_key_values(std::string_view text);
KeyValues read_key_values(const std::filesystem::path& path);
std::string format_key_values(const KeyValues& kv);

// Everything a training run depends on.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  std::string data;
  std::string target = "OT";
  std::string timestamp_column = "date";
  bool scale = true;  // z-score the series with train-split statistics
  std::string out = "runs";

  // Applies keys in order. Unknown keys and ill-typed values are ConfigErrors.
  void apply(const KeyValues& kv);
  void validate() const;
  // Every key in a fixed order, values in canonical form.
  KeyValues to_key_values() const;
  // Identity of the run: excludes the output directory.
  KeyValues identity() const;
};

// Git blob hash (SHA-1 over "blob <len>\0" + content) as 40 hex digits.
std::string git_blob_hash(std::string_view content);
std::string config_hash(const RunConfig& cfg);

// First of path, path.v2, path.v3, ... (inserted before the extension)
// that does not exist yet.
std::filesystem::path versioned_file(const std::filesystem::path& path);
// First of dir, dir-v2, dir-v3, ... that does not exist yet.
std::filesystem::path versioned_dir(const std::filesystem::path& dir);

// Canonical spelling of a double that round-trips exactly.
std::string format_double(double v);

}  // namespace tpgn
