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

// Command-line front end. Talks to the library only through tpgn.h.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tpgn/tpgn.h"

namespace {

struct ConfigDeleter {
  void operator()(tpgn_config* c) const { tpgn_config_destroy(c); }
};
struct ResultDeleter {
  void operator()(tpgn_result* r) const { tpgn_result_destroy(r); }
};
using ConfigPtr = std::unique_ptr<tpgn_config, ConfigDeleter>;
using ResultPtr = std::unique_ptr<tpgn_result, ResultDeleter>;

int report(tpgn_status s) {
  if (s != TPGN_OK) std::cerr << "tpgn: " << tpgn_status_name(s) << ": " << tpgn_last_error() << '\n';
  return static_cast<int>(s == TPGN_ERR_ARGUMENT || s == TPGN_ERR_IO ? TPGN_ERR_OTHER : s);
}

// Flags shared by the commands that take a run configuration. Values stay
// strings here; the library validates them.
struct RunFlags {
  std::string config;
  std::map<std::string, std::string> values;

  void attach(CLI::App& app) {
    app.add_option("--config", config, "key=value config file");
    const std::pair<const char*, const char*> flags[] = {
        {"data", "CSV dataset"},
        {"target", "target column"},
        {"lh", "history length L_h"},
        {"lf", "forecast length L_f"},
        {"period", "period P"},
        {"dm", "hidden size d_m"},
        {"norm", "per-window normalization, 0 or 1"},
        {"variant", "full, long, short, gru, lstm or mlp"},
        {"seed", "random seed"},
        {"out", "output root directory"},
        {"noise-eps", "fraction of training history perturbed"},
    };
    for (const auto& [name, help] : flags) {
      std::string key = name;
      for (char& c : key) c = c == '-' ? '_' : c;
      app.add_option_function<std::string>(
          std::string("--") + name, [this, key](const std::string& v) { values[key] = v; }, help);
    }
  }

  // Defaults, then the config file, then flags.
  tpgn_status build(ConfigPtr& out, const std::map<std::string, std::string>& base = {}) const {
    tpgn_config* raw = nullptr;
    tpgn_status s = tpgn_config_create(&raw);
    if (s != TPGN_OK) return s;
    out.reset(raw);
    for (const auto& [k, v] : base) {
      if ((s = tpgn_config_set(raw, k.c_str(), v.c_str())) != TPGN_OK) return s;
    }
    if (!config.empty() && (s = tpgn_config_load_file(raw, config.c_str())) != TPGN_OK) return s;
    for (const auto& [k, v] : values) {
      if ((s = tpgn_config_set(raw, k.c_str(), v.c_str())) != TPGN_OK) return s;
    }
    return TPGN_OK;
  }
};

std::string text(const tpgn_result* r, const char* name) {
  const char* t = tpgn_result_text(r, name);
  return t ? t : "";
}

double number(const tpgn_result* r, const char* name) {
  double v = 0.0;
  tpgn_result_number(r, name, &v);
  return v;
}

int cmd_train(const RunFlags& flags, bool quiet) {
  ConfigPtr cfg;
  if (tpgn_status s = flags.build(cfg); s != TPGN_OK) return report(s);
  tpgn_result* raw = nullptr;
  const tpgn_status s = tpgn_train(cfg.get(), quiet ? 0 : 1, &raw);
  ResultPtr res(raw);
  if (res) {
    std::cout << text(res.get(), "metrics");
    std::cerr << text(res.get(), "summary") << '\n';
  }
  return report(s);
}

int cmd_eval(const RunFlags& flags, const std::string& checkpoint, bool quiet) {
  ConfigPtr cfg;
  if (tpgn_status s = flags.build(cfg); s != TPGN_OK) return report(s);
  tpgn_result* raw = nullptr;
  const tpgn_status s = tpgn_eval(checkpoint.c_str(), cfg.get(), quiet ? 0 : 1, &raw);
  ResultPtr res(raw);
  if (res) {
    std::cout << text(res.get(), "metrics");
    std::cerr << "eval " << text(res.get(), "dir") << ": test MSE "
              << number(res.get(), "test_mse") << ", MAE " << number(res.get(), "test_mae")
              << '\n';
  }
  return report(s);
}

int cmd_gradcheck(const RunFlags& flags, double threshold) {
  ConfigPtr cfg;
  const std::map<std::string, std::string> tiny = {
      {"lh", "8"}, {"lf", "8"}, {"period", "4"}, {"dm", "2"}};
  if (tpgn_status s = flags.build(cfg, tiny); s != TPGN_OK) return report(s);
  tpgn_result* raw = nullptr;
  const tpgn_status s = tpgn_gradcheck(cfg.get(), &raw);
  ResultPtr res(raw);
  if (s != TPGN_OK) return report(s);
  const double worst = number(res.get(), "max_error");
  std::cout << text(res.get(), "csv");
  std::cerr << "gradcheck: " << number(res.get(), "tensors") << " tensors, max relative error "
            << worst << (worst < threshold ? " (ok)" : " (above threshold)") << '\n';
  return worst < threshold ? 0 : 1;
}

struct BenchFlags {
  std::string mode = "train";
  std::size_t repeats = 3;
  std::size_t warmup = 1;
  std::string out = "runs/bench";
  std::optional<std::string> model;
  std::size_t lh = 168, lf = 168, dm = 128, batch = 32, period = 24;
};

int cmd_bench(const BenchFlags& f, bool quiet) {
  const int forward = f.mode == "forward";
  std::vector<tpgn_bench_scenario> list;
  if (f.model) {
    tpgn_bench_scenario s;
    tpgn_bench_scenario_default(&s);
    const std::map<std::string, tpgn_bench_model> names = {{"TPGN", TPGN_BENCH_TPGN},
                                                           {"PGN-raw", TPGN_BENCH_PGN_RAW},
                                                           {"GRU-seq", TPGN_BENCH_GRU_SEQ},
                                                           {"LSTM-seq", TPGN_BENCH_LSTM_SEQ}};
    s.model = names.at(*f.model);
    s.history = f.lh;
    s.horizon = f.lf;
    s.d_model = f.dm;
    s.batch = f.batch;
    s.period = f.period;
    s.repeats = f.repeats;
    s.warmup = f.warmup;
    s.forward_only = forward;
    list.push_back(s);
  } else {
    list.resize(tpgn_bench_default_sweep(forward, f.repeats, nullptr, 0));
    tpgn_bench_default_sweep(forward, f.repeats, list.data(), list.size());
    for (auto& s : list) s.warmup = f.warmup;
  }
  tpgn_result* raw = nullptr;
  const tpgn_status s = tpgn_bench(list.data(), list.size(), f.out.c_str(), quiet ? 0 : 1, &raw);
  ResultPtr res(raw);
  if (s != TPGN_OK) return report(s);
  std::cout << text(res.get(), "csv");
  std::cerr << "bench: " << list.size() << " scenarios, " << number(res.get(), "failed")
            << " failed, written to " << text(res.get(), "path") << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TPGN forecasting: train, evaluate and benchmark"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress progress output");

  RunFlags train_flags, eval_flags, grad_flags;
  auto* train = app.add_subcommand("train", "train a model and evaluate it on the test split");
  train_flags.attach(*train);

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on its test split");
  std::string checkpoint;
  eval->add_option("--checkpoint", checkpoint, "checkpoint.tpgn file")->required();
  eval_flags.attach(*eval);

  auto* grad = app.add_subcommand("gradcheck", "finite-difference check of all parameters");
  double threshold = 1e-5;
  grad->add_option("--threshold", threshold, "largest accepted relative error");
  grad_flags.attach(*grad);

  auto* bench = app.add_subcommand("bench", "time and memory benchmarks");
  BenchFlags bf;
  bench->add_option("--mode", bf.mode, "train or forward")
      ->check(CLI::IsMember({"train", "forward"}));
  bench->add_option("--repeats", bf.repeats, "timed repetitions (>= 3)");
  bench->add_option("--warmup", bf.warmup, "untimed repetitions (>= 1)");
  bench->add_option("--out", bf.out, "directory for bench.csv");
  bench->add_option("--model", bf.model, "single scenario: TPGN, PGN-raw, GRU-seq or LSTM-seq")
      ->check(CLI::IsMember({"TPGN", "PGN-raw", "GRU-seq", "LSTM-seq"}));
  bench->add_option("--lh", bf.lh, "history length");
  bench->add_option("--lf", bf.lf, "forecast length");
  bench->add_option("--dm", bf.dm, "hidden size");
  bench->add_option("--batch", bf.batch, "batch size");
  bench->add_option("--period", bf.period, "TPGN period");

  auto* synth = app.add_subcommand("synth", "write an hourly sinusoid CSV");
  std::string synth_out;
  std::size_t length = 4800, period = 24;
  double drift = 0.0;
  synth->add_option("--out", synth_out, "CSV path")->required();
  synth->add_option("--length", length, "number of hourly samples");
  synth->add_option("--period", period, "period in hours");
  synth->add_option("--drift", drift, "relative period stretch");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : TPGN_ERR_CONFIG;
  }

  if (train->parsed()) return cmd_train(train_flags, quiet);
  if (eval->parsed()) return cmd_eval(eval_flags, checkpoint, quiet);
  if (grad->parsed()) return cmd_gradcheck(grad_flags, threshold);
  if (bench->parsed()) return cmd_bench(bf, quiet);
  if (synth->parsed()) {
    const tpgn_status s = tpgn_synth(synth_out.c_str(), length, period, drift);
    if (s == TPGN_OK) std::cerr << "wrote " << synth_out << '\n';
    return report(s);
  }
  return TPGN_ERR_OTHER;
}
