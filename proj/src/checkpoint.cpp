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

#include "tpgn/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "tpgn/errors.hpp"

namespace tpgn {

namespace {

constexpr std::string_view kMagic = "TPGN1";

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return v;
  }

  std::string_view take(std::uint64_t n) {
    need(n);
    const std::string_view s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::string_view rest() const { return bytes_.substr(pos_); }

 private:
  void need(std::uint64_t n) const {
    if (n > bytes_.size() - pos_) throw IoError("checkpoint is truncated");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

KeyValues model_entries(const ModelConfig& m) {
  return {
      {"lh", std::to_string(m.history)},
      {"lf", std::to_string(m.horizon)},
      {"period", std::to_string(m.period)},
      {"dm", std::to_string(m.d_model)},
      {"time_features", std::to_string(m.time_features)},
      {"norm", m.norm ? "1" : "0"},
      {"variant", m.variant.name()},
      {"head_per_phase", m.head_per_phase ? "1" : "0"},
      {"long_map", m.long_map == LongMap::kShared ? "shared" : "full"},
  };
}

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ck) {
  std::string out(kMagic);
  ck.params.visit([&](const std::string& name, const Tensor& t) {
    put_u64(out, name.size());
    out += name;
    put_u64(out, t.rank());
    for (std::size_t d : t.shape()) put_u64(out, d);
    for (double v : t.values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  });
  put_u64(out, 0);

  KeyValues block = model_entries(ck.params.config);
  std::set<std::string> taken;
  for (const auto& kv : block) taken.insert(kv.first);
  taken.insert("best_val_loss");
  taken.insert("epoch");
  for (const auto& kv : ck.extra) {
    if (taken.insert(kv.first).second) block.push_back(kv);
  }
  block.emplace_back("best_val_loss", hex_double(ck.best_val_loss));
  block.emplace_back("epoch", std::to_string(ck.epoch));
  out += format_key_values(block);
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  Reader in(bytes);
  if (in.take(kMagic.size()) != kMagic) throw IoError("not a TPGN checkpoint (bad magic)");

  std::map<std::string, Tensor> tensors;
  for (;;) {
    const std::uint64_t name_len = in.u64();
    if (name_len == 0) break;
    if (name_len > 4096) throw IoError("checkpoint tensor name is implausibly long");
    std::string name(in.take(name_len));
    const std::uint64_t rank = in.u64();
    if (rank > 8) throw IoError("checkpoint tensor '" + name + "' has rank " + std::to_string(rank));
    Shape shape(rank);
    std::uint64_t count = 1;
    for (auto& d : shape) {
      d = in.u64();
      count *= d;
    }
    const std::string_view payload = in.take(count * 8);
    std::vector<double> values(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) {
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(payload[i * 8 + b]))
                << (8 * b);
      }
      values[i] = std::bit_cast<double>(bits);
    }
    if (!tensors.emplace(name, Tensor(std::move(shape), std::move(values))).second) {
      throw IoError("checkpoint repeats tensor '" + name + "'");
    }
  }

  KeyValues block;
  try {
    block = parse_key_values(in.rest());
  } catch (const ConfigError& e) {
    throw IoError(std::string("checkpoint config block: ") + e.what());
  }
  Checkpoint ck;
  ModelConfig model;
  KeyValues model_keys;
  bool have_loss = false, have_epoch = false;
  for (const auto& [k, v] : block) {
    if (k == "best_val_loss") {
      char* end = nullptr;
      ck.best_val_loss = std::strtod(v.c_str(), &end);
      if (end == v.c_str() || *end != '\0') throw IoError("bad best_val_loss '" + v + "'");
      have_loss = true;
    } else if (k == "epoch") {
      ck.epoch = std::strtoull(v.c_str(), nullptr, 10);
      have_epoch = true;
    } else if (k == "time_features") {
      model.time_features = std::strtoull(v.c_str(), nullptr, 10);
    } else if (k == "lh" || k == "lf" || k == "period" || k == "dm" || k == "norm" ||
               k == "variant" || k == "head_per_phase" || k == "long_map") {
      model_keys.emplace_back(k, v);
    } else {
      ck.extra.emplace_back(k, v);
    }
  }
  if (!have_loss || !have_epoch) throw IoError("checkpoint config block is incomplete");
  RunConfig rc;
  rc.model = model;
  rc.apply(model_keys);

  Rng unused(0);
  ck.params = TpgnParams::init(rc.model, unused);
  std::size_t matched = 0;
  ck.params.visit([&](const std::string& name, Tensor& t) {
    const auto it = tensors.find(name);
    if (it == tensors.end()) throw IoError("checkpoint lacks tensor '" + name + "'");
    if (it->second.shape() != t.shape()) {
      throw IoError("checkpoint tensor '" + name + "' has shape " + to_string(it->second.shape()) +
                    ", model expects " + to_string(t.shape()));
    }
    t = it->second;
    ++matched;
  });
  if (matched != tensors.size()) throw IoError("checkpoint has tensors the model does not use");
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  const std::string bytes = serialize_checkpoint(ck);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing checkpoint '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_checkpoint(buf.str());
}

}  // namespace tpgn
