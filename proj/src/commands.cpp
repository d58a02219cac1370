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

#include "tpgn/commands.hpp"

#include <fstream>
#include <sstream>

#include "tpgn/errors.hpp"
#include "tpgn/gradcheck.hpp"
#include "tpgn/ops.hpp"

namespace tpgn {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Metrics to_original(const Metrics& m, const Scaler& s) {
  return {m.mse * s.std * s.std, m.mae * s.std, m.windows};
}

std::string format_epoch_log(const std::vector<EpochLog>& log) {
  std::string out = "epoch,train_loss,val_loss,elapsed_seconds\n";
  for (const EpochLog& e : log) {
    out += std::to_string(e.epoch) + ',' + format_double(e.train_loss) + ',' +
           format_double(e.val_loss) + ',' + format_double(e.elapsed_seconds) + '\n';
  }
  return out;
}

std::string format_predictions(const TpgnParams& params, const WindowSet& test,
                               const Scaler& scaler) {
  const Tensor pred = predict(params, test, 0, 1);
  const std::vector<Timestamp> times = test.target_times(0);
  const auto truth = test.values().subspan(test.history(), test.horizon());
  std::string out = "timestamp,truth,prediction\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    out += format_datetime(times[i]) + ',' + format_double(truth[i] * scaler.std + scaler.mean) +
           ',' + format_double(pred.values()[i] * scaler.std + scaler.mean) + '\n';
  }
  return out;
}

}  // namespace

std::string format_metrics(const Metrics& scaled, const Metrics& original) {
  return "split,mse,mae,mse_original,mae_original,windows\ntest," + format_double(scaled.mse) +
         ',' + format_double(scaled.mae) + ',' + format_double(original.mse) + ',' +
         format_double(original.mae) + ',' + std::to_string(scaled.windows) + '\n';
}

SplitWindows load_windows(const RunConfig& cfg) {
  if (cfg.data.empty()) throw DataError("no dataset given (set data= or --data)");
  const RawSeries raw = load_csv(cfg.data, cfg.target, cfg.timestamp_column);
  const RawSeries hourly = aggregate_hourly(raw);
  SplitSpec spec;
  spec.history = cfg.model.history;
  spec.horizon = cfg.model.horizon;
  spec.scale = cfg.scale;
  return split_and_window(hourly, spec);
}

TrainOutcome run_train(const RunConfig& cfg, std::ostream* log) {
  cfg.validate();
  if (cfg.model.time_features != kTimeFeatures) {
    throw ConfigError("the data pipeline produces " + std::to_string(kTimeFeatures) +
                      " time features");
  }
  TrainOutcome res;
  res.hash = config_hash(cfg);
  res.dir = versioned_dir(std::filesystem::path(cfg.out) / ("run-" + res.hash.substr(0, 12)));
  std::filesystem::create_directories(res.dir);
  KeyValues manifest = cfg.to_key_values();
  manifest.emplace_back("config_hash", res.hash);
  manifest.emplace_back("output_dir", res.dir.string());
  write_text(res.dir / "manifest.txt", format_key_values(manifest));

  const SplitWindows data = load_windows(cfg);
  if (log) {
    *log << "windows: train " << data.train.size() << ", val " << data.val.size() << ", test "
         << data.test.size() << '\n';
  }
  Rng rng(cfg.train.seed);
  const TpgnParams init = TpgnParams::init(cfg.model, rng);
  res.fit = fit(init, data.train, data.val, cfg.train, [&](const EpochLog& e) {
    if (log) {
      *log << "epoch " << e.epoch << " train " << e.train_loss << " val " << e.val_loss << " ("
           << e.elapsed_seconds << " s)\n";
    }
  });

  Checkpoint ck{res.fit.best, res.fit.best_val_loss, res.fit.best_epoch, cfg.identity()};
  save_checkpoint(res.dir / "checkpoint.tpgn", ck);
  write_text(res.dir / "epoch_log.csv", format_epoch_log(res.fit.log));
  res.test = evaluate(res.fit.best, data.test);
  res.test_original = to_original(res.test, data.scaler);
  write_text(res.dir / "metrics.csv", format_metrics(res.test, res.test_original));
  write_text(res.dir / "predictions.csv", format_predictions(res.fit.best, data.test, data.scaler));
  if (log && res.fit.diverged) *log << "training diverged: " << res.fit.message << '\n';
  return res;
}

EvalOutcome run_eval(const std::filesystem::path& checkpoint, const KeyValues& overrides,
                     std::ostream* log) {
  const std::string bytes = read_bytes(checkpoint);
  const Checkpoint ck = deserialize_checkpoint(bytes);
  RunConfig cfg;
  cfg.model = ck.params.config;
  cfg.apply(ck.extra);
  // Evaluations land next to the run directory unless redirected.
  const std::filesystem::path run_root =
      std::filesystem::absolute(checkpoint).parent_path().parent_path();
  if (!run_root.empty()) cfg.out = run_root.string();
  cfg.apply(overrides);
  cfg.validate();
  if (!(cfg.model == ck.params.config)) {
    throw ConfigError("overrides change the model shape stored in the checkpoint");
  }
  EvalOutcome res;
  const std::string hash = git_blob_hash(bytes + format_key_values(overrides));
  res.dir = versioned_dir(std::filesystem::path(cfg.out) / ("eval-" + hash.substr(0, 12)));
  std::filesystem::create_directories(res.dir);
  KeyValues manifest = cfg.to_key_values();
  manifest.emplace_back("checkpoint", checkpoint.string());
  manifest.emplace_back("config_hash", hash);
  manifest.emplace_back("output_dir", res.dir.string());
  write_text(res.dir / "manifest.txt", format_key_values(manifest));

  const SplitWindows data = load_windows(cfg);
  res.test = evaluate(ck.params, data.test);
  res.test_original = to_original(res.test, data.scaler);
  write_text(res.dir / "metrics.csv", format_metrics(res.test, res.test_original));
  if (log) *log << "test windows: " << res.test.windows << '\n';
  return res;
}

std::vector<std::pair<std::string, double>> gradcheck_model(const ModelConfig& cfg,
                                                            std::uint64_t seed,
                                                            std::size_t batch) {
  Rng rng(seed);
  const TpgnParams params = TpgnParams::init(cfg, rng);
  const auto random = [&](Shape shape) {
    Tensor t(std::move(shape));
    for (double& v : t.mutable_values()) v = rng.uniform(-1.0, 1.0);
    return t;
  };
  // Non-zero biases so every gradient path is exercised.
  TpgnParams base = params;
  base.visit([&](const std::string&, Tensor& t) { t = random(t.shape()); });
  const Tensor history = random({batch, cfg.history});
  const Tensor features = random({batch, cfg.history, cfg.time_features});
  const Tensor target = random({batch, cfg.horizon});

  std::vector<std::pair<std::string, double>> out;
  std::vector<std::string> names;
  base.visit([&](const std::string& name, const Tensor&) { names.push_back(name); });
  for (std::size_t k = 0; k < names.size(); ++k) {
    Tensor current;
    std::size_t i = 0;
    base.visit([&](const std::string&, const Tensor& t) {
      if (i++ == k) current = t;
    });
    const ScalarFn f = [&](const Tensor& x) {
      TpgnParams q = base;
      std::size_t j = 0;
      q.visit([&](const std::string&, Tensor& t) {
        if (j++ == k) t = x;
      });
      return mse_loss(tpgn_forward(history, features, q), target);
    };
    out.emplace_back(names[k], finite_diff_check(f, current));
  }
  return out;
}

void write_series_csv(const std::filesystem::path& path, const RawSeries& s) {
  std::string text = "date," + s.target_name + "\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    text += format_datetime(s.timestamps[i]) + ',' + format_double(s.values[i]) + '\n';
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_text(path, text);
}

}  // namespace tpgn
