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
#include <string>
#include <string_view>

#include "tpgn/config.hpp"
#include "tpgn/tpgn_model.hpp"

namespace tpgn {

// Binary layout, all integers u64 little-endian:
//   "TPGN1"
//   per tensor: name length, name bytes, rank, dims..., f64 LE payload
//   u64 0 (empty name ends the tensor list)
//   UTF-8 key=value lines echoing the model config, `extra`,
//   best_val_loss (C99 hex float) and epoch.
struct Checkpoint {
  TpgnParams params;
  double best_val_loss = 0.0;
  std::uint64_t epoch = 0;
  KeyValues extra;  // free-form echo, e.g. the run config
};

std::string serialize_checkpoint(const Checkpoint& ck);
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace tpgn
