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

#include "tpgn/tpgn.h"

#include <cstring>
#include <iostream>
#include <map>
#include <new>
#include <sstream>
#include <string>

#include "tpgn/bench.hpp"
#include "tpgn/commands.hpp"
#include "tpgn/errors.hpp"
#include "tpgn/parallel.hpp"

struct tpgn_config {
  tpgn::RunConfig run;
  tpgn::KeyValues assigned;  // every key set so far, in order
};

struct tpgn_model {
  tpgn::Checkpoint checkpoint;
};

struct tpgn_result {
  std::map<std::string, double> numbers;
  std::map<std::string, std::string> texts;
};

namespace {

thread_local std::string g_last_error;

tpgn_status fail(tpgn_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
tpgn_status guard(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const tpgn::ConfigError& e) {
    return fail(TPGN_ERR_CONFIG, e.what());
  } catch (const tpgn::DataError& e) {
    return fail(TPGN_ERR_DATA, e.what());
  } catch (const tpgn::NumericError& e) {
    return fail(TPGN_ERR_DIVERGED, e.what());
  } catch (const tpgn::IoError& e) {
    return fail(TPGN_ERR_IO, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(TPGN_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(TPGN_ERR_OTHER, "out of memory");
  } catch (const std::exception& e) {
    return fail(TPGN_ERR_OTHER, e.what());
  }
}

tpgn::BenchScenario from_c(const tpgn_bench_scenario& c) {
  tpgn::BenchScenario s;
  switch (c.model) {
    case TPGN_BENCH_TPGN: s.model = tpgn::BenchModel::kTpgn; break;
    case TPGN_BENCH_PGN_RAW: s.model = tpgn::BenchModel::kPgnRaw; break;
    case TPGN_BENCH_GRU_SEQ: s.model = tpgn::BenchModel::kGruSeq; break;
    case TPGN_BENCH_LSTM_SEQ: s.model = tpgn::BenchModel::kLstmSeq; break;
    default: throw tpgn::ConfigError("unknown bench model code " + std::to_string(c.model));
  }
  s.history = c.history;
  s.horizon = c.horizon;
  s.d_model = c.d_model;
  s.batch = c.batch;
  s.period = c.period;
  s.repeats = c.repeats;
  s.warmup = c.warmup;
  s.mode = c.forward_only ? tpgn::BenchMode::kForward : tpgn::BenchMode::kTrainStep;
  return s;
}

tpgn_bench_scenario to_c(const tpgn::BenchScenario& s) {
  tpgn_bench_scenario c{};
  c.model = static_cast<tpgn_bench_model>(s.model);
  c.history = s.history;
  c.horizon = s.horizon;
  c.d_model = s.d_model;
  c.batch = s.batch;
  c.period = s.period;
  c.repeats = s.repeats;
  c.warmup = s.warmup;
  c.forward_only = s.mode == tpgn::BenchMode::kForward;
  return c;
}

void put_metrics(tpgn_result& r, const tpgn::Metrics& m, const tpgn::Metrics& orig) {
  r.numbers["test_mse"] = m.mse;
  r.numbers["test_mae"] = m.mae;
  r.numbers["test_mse_original"] = orig.mse;
  r.numbers["test_mae_original"] = orig.mae;
  r.numbers["windows"] = static_cast<double>(m.windows);
  r.texts["metrics"] = tpgn::format_metrics(m, orig);
}

}  // namespace

extern "C" {

const char* tpgn_version(void) { return "0.1.0"; }

const char* tpgn_last_error(void) { return g_last_error.c_str(); }

const char* tpgn_status_name(tpgn_status status) {
  switch (status) {
    case TPGN_OK: return "ok";
    case TPGN_ERR_OTHER: return "error";
    case TPGN_ERR_CONFIG: return "config error";
    case TPGN_ERR_DATA: return "data error";
    case TPGN_ERR_DIVERGED: return "numeric divergence";
    case TPGN_ERR_ARGUMENT: return "invalid argument";
    case TPGN_ERR_IO: return "i/o error";
  }
  return "unknown status";
}

tpgn_status tpgn_config_create(tpgn_config** out) {
  if (!out) return fail(TPGN_ERR_ARGUMENT, "out is NULL");
  return guard([&] {
    *out = new tpgn_config();
    return TPGN_OK;
  });
}

void tpgn_config_destroy(tpgn_config* cfg) { delete cfg; }

tpgn_status tpgn_config_load_file(tpgn_config* cfg, const char* path) {
  if (!cfg || !path) return fail(TPGN_ERR_ARGUMENT, "cfg or path is NULL");
  return guard([&] {
    const tpgn::KeyValues kv = tpgn::read_key_values(path);
    tpgn::RunConfig next = cfg->run;
    next.apply(kv);
    cfg->run = next;
    cfg->assigned.insert(cfg->assigned.end(), kv.begin(), kv.end());
    return TPGN_OK;
  });
}

tpgn_status tpgn_config_set(tpgn_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(TPGN_ERR_ARGUMENT, "cfg, key or value is NULL");
  return guard([&] {
    cfg->run.apply({{key, value}});
    cfg->assigned.emplace_back(key, value);
    return TPGN_OK;
  });
}

tpgn_status tpgn_config_get(const tpgn_config* cfg, const char* key, char* buf, size_t cap,
                            size_t* needed) {
  if (!cfg || !key) return fail(TPGN_ERR_ARGUMENT, "cfg or key is NULL");
  return guard([&] {
    for (const auto& [k, v] : cfg->run.to_key_values()) {
      if (k != key) continue;
      if (needed) *needed = v.size();
      if (buf && cap > 0) {
        const size_t n = std::min(cap - 1, v.size());
        std::memcpy(buf, v.data(), n);
        buf[n] = '\0';
      }
      return TPGN_OK;
    }
    return fail(TPGN_ERR_CONFIG, std::string("unknown config key '") + key + "'");
  });
}

tpgn_status tpgn_config_validate(const tpgn_config* cfg) {
  if (!cfg) return fail(TPGN_ERR_ARGUMENT, "cfg is NULL");
  return guard([&] {
    cfg->run.validate();
    return TPGN_OK;
  });
}

tpgn_status tpgn_config_hash(const tpgn_config* cfg, char out[41]) {
  if (!cfg || !out) return fail(TPGN_ERR_ARGUMENT, "cfg or out is NULL");
  return guard([&] {
    const std::string h = tpgn::config_hash(cfg->run);
    std::memcpy(out, h.c_str(), 41);
    return TPGN_OK;
  });
}

void tpgn_result_destroy(tpgn_result* res) { delete res; }

tpgn_status tpgn_result_number(const tpgn_result* res, const char* name, double* out) {
  if (!res || !name || !out) return fail(TPGN_ERR_ARGUMENT, "res, name or out is NULL");
  const auto it = res->numbers.find(name);
  if (it == res->numbers.end()) {
    return fail(TPGN_ERR_ARGUMENT, std::string("result has no number '") + name + "'");
  }
  *out = it->second;
  return TPGN_OK;
}

const char* tpgn_result_text(const tpgn_result* res, const char* name) {
  if (!res || !name) return nullptr;
  const auto it = res->texts.find(name);
  return it == res->texts.end() ? nullptr : it->second.c_str();
}

tpgn_status tpgn_train(const tpgn_config* cfg, int verbose, tpgn_result** out) {
  if (!cfg || !out) return fail(TPGN_ERR_ARGUMENT, "cfg or out is NULL");
  *out = nullptr;
  return guard([&] {
    const tpgn::TrainOutcome o = tpgn::run_train(cfg->run, verbose ? &std::cerr : nullptr);
    auto res = std::make_unique<tpgn_result>();
    put_metrics(*res, o.test, o.test_original);
    res->numbers["best_val_loss"] = o.fit.best_val_loss;
    res->numbers["best_epoch"] = static_cast<double>(o.fit.best_epoch);
    res->numbers["epochs"] = static_cast<double>(o.fit.log.size());
    res->numbers["steps"] = static_cast<double>(o.fit.steps);
    res->texts["dir"] = o.dir.string();
    res->texts["hash"] = o.hash;
    std::ostringstream summary;
    summary << "run " << o.dir.string() << ": " << o.fit.log.size() << " epochs, best epoch "
            << o.fit.best_epoch << ", test MSE " << o.test.mse << ", MAE " << o.test.mae;
    res->texts["summary"] = summary.str();
    *out = res.release();
    if (o.fit.diverged) return fail(TPGN_ERR_DIVERGED, o.fit.message);
    return TPGN_OK;
  });
}

tpgn_status tpgn_eval(const char* checkpoint_path, const tpgn_config* overrides, int verbose,
                      tpgn_result** out) {
  if (!checkpoint_path || !out) return fail(TPGN_ERR_ARGUMENT, "checkpoint or out is NULL");
  *out = nullptr;
  return guard([&] {
    const tpgn::KeyValues kv = overrides ? overrides->assigned : tpgn::KeyValues{};
    const tpgn::EvalOutcome o =
        tpgn::run_eval(checkpoint_path, kv, verbose ? &std::cerr : nullptr);
    auto res = std::make_unique<tpgn_result>();
    put_metrics(*res, o.test, o.test_original);
    res->texts["dir"] = o.dir.string();
    *out = res.release();
    return TPGN_OK;
  });
}

tpgn_status tpgn_gradcheck(const tpgn_config* cfg, tpgn_result** out) {
  if (!cfg || !out) return fail(TPGN_ERR_ARGUMENT, "cfg or out is NULL");
  *out = nullptr;
  return guard([&] {
    cfg->run.model.validate();
    const auto errors = tpgn::gradcheck_model(cfg->run.model, cfg->run.train.seed);
    auto res = std::make_unique<tpgn_result>();
    double worst = 0.0;
    std::string csv = "tensor,max_rel_error\n";
    for (const auto& [name, err] : errors) {
      worst = std::max(worst, err);
      csv += name + ',' + tpgn::format_double(err) + '\n';
    }
    res->numbers["max_error"] = worst;
    res->numbers["tensors"] = static_cast<double>(errors.size());
    res->texts["csv"] = csv;
    *out = res.release();
    return TPGN_OK;
  });
}

void tpgn_bench_scenario_default(tpgn_bench_scenario* s) {
  if (s) *s = to_c(tpgn::BenchScenario{});
}

size_t tpgn_bench_default_sweep(int forward_only, size_t repeats, tpgn_bench_scenario* out,
                                size_t cap) {
  const auto all = tpgn::default_sweep(
      forward_only ? tpgn::BenchMode::kForward : tpgn::BenchMode::kTrainStep, repeats);
  for (size_t i = 0; out && i < all.size() && i < cap; ++i) out[i] = to_c(all[i]);
  return all.size();
}

tpgn_status tpgn_bench(const tpgn_bench_scenario* scenarios, size_t count, const char* dir,
                       int verbose, tpgn_result** out) {
  if ((!scenarios && count) || !dir || !out) {
    return fail(TPGN_ERR_ARGUMENT, "scenarios, dir or out is NULL");
  }
  *out = nullptr;
  return guard([&] {
    std::vector<tpgn::BenchScenario> list;
    for (size_t i = 0; i < count; ++i) {
      list.push_back(from_c(scenarios[i]));
      list.back().validate();
    }
    std::vector<tpgn::BenchRecord> records;
    const auto path = tpgn::sweep(list, dir, &records, verbose ? &std::cerr : nullptr);
    auto res = std::make_unique<tpgn_result>();
    double failed = 0;
    for (const auto& r : records) failed += r.ok ? 0 : 1;
    std::ostringstream csv;
    tpgn::write_bench_csv(csv, records);
    res->numbers["failed"] = failed;
    res->texts["path"] = path.string();
    res->texts["csv"] = csv.str();
    *out = res.release();
    return TPGN_OK;
  });
}

tpgn_status tpgn_synth(const char* path, size_t length, size_t period, double drift) {
  if (!path) return fail(TPGN_ERR_ARGUMENT, "path is NULL");
  return guard([&] {
    tpgn::write_series_csv(path, tpgn::make_sinusoid(length, period, drift));
    return TPGN_OK;
  });
}

tpgn_status tpgn_model_load(const char* path, tpgn_model** out) {
  if (!path || !out) return fail(TPGN_ERR_ARGUMENT, "path or out is NULL");
  *out = nullptr;
  return guard([&] {
    auto m = std::make_unique<tpgn_model>();
    m->checkpoint = tpgn::load_checkpoint(path);
    *out = m.release();
    return TPGN_OK;
  });
}

void tpgn_model_destroy(tpgn_model* model) { delete model; }

size_t tpgn_model_history(const tpgn_model* model) {
  return model ? model->checkpoint.params.config.history : 0;
}

size_t tpgn_model_horizon(const tpgn_model* model) {
  return model ? model->checkpoint.params.config.horizon : 0;
}

size_t tpgn_model_time_features(const tpgn_model* model) {
  return model ? model->checkpoint.params.config.time_features : 0;
}

tpgn_status tpgn_model_predict(const tpgn_model* model, const double* history,
                               const double* time_features, size_t batch, double* out) {
  if (!model || !history || !out || batch == 0) {
    return fail(TPGN_ERR_ARGUMENT, "model, history or out is NULL, or batch is 0");
  }
  const auto& cfg = model->checkpoint.params.config;
  if (!time_features && cfg.time_features != 0) {
    return fail(TPGN_ERR_ARGUMENT, "time_features is NULL");
  }
  return guard([&] {
    const size_t lh = cfg.history, ct = cfg.time_features;
    const tpgn::Tensor h({batch, lh}, std::vector<double>(history, history + batch * lh));
    const tpgn::Tensor tf({batch, lh, ct},
                          ct ? std::vector<double>(time_features, time_features + batch * lh * ct)
                             : std::vector<double>());
    const tpgn::Tensor y = tpgn::tpgn_forward(h, tf, model->checkpoint.params);
    std::copy(y.values().begin(), y.values().end(), out);
    return TPGN_OK;
  });
}

void tpgn_set_threads(size_t n) { tpgn::set_thread_count(n); }

}  // extern "C"
