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

#ifndef TPGN_TPGN_H_
#define TPGN_TPGN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(TPGN_BUILDING_LIBRARY)
#define TPGN_API __declspec(dllexport)
#else
#define TPGN_API __declspec(dllimport)
#endif
#else
#define TPGN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

// Status codes double as process exit codes for the command-line tool.
typedef enum tpgn_status {
  TPGN_OK = 0,
  TPGN_ERR_OTHER = 1,
  TPGN_ERR_CONFIG = 2,
  TPGN_ERR_DATA = 3,
  TPGN_ERR_DIVERGED = 4,
  TPGN_ERR_ARGUMENT = 5,
  TPGN_ERR_IO = 6,
} tpgn_status;

typedef struct tpgn_config tpgn_config;
typedef struct tpgn_model tpgn_model;
typedef struct tpgn_result tpgn_result;

TPGN_API const char* tpgn_version(void);
// Message for the last failing call on this thread; never NULL.
TPGN_API const char* tpgn_last_error(void);
TPGN_API const char* tpgn_status_name(tpgn_status status);

// Run configuration. Keys: data, target, timestamp_column, out, lh, lf,
// period, dm, norm, variant, head_per_phase, long_map, scale, seed, lr,
// batch_size, max_epochs, patience, max_steps, noise_eps.
TPGN_API tpgn_status tpgn_config_create(tpgn_config** out);
TPGN_API void tpgn_config_destroy(tpgn_config* cfg);
// Applies a key=value file on top of the current values.
TPGN_API tpgn_status tpgn_config_load_file(tpgn_config* cfg, const char* path);
TPGN_API tpgn_status tpgn_config_set(tpgn_config* cfg, const char* key, const char* value);
// Copies the canonical value of `key` into buf (NUL-terminated, truncated to
// cap). *needed, if non-NULL, receives the full length excluding the NUL.
TPGN_API tpgn_status tpgn_config_get(const tpgn_config* cfg, const char* key, char* buf,
                                     size_t cap, size_t* needed);
TPGN_API tpgn_status tpgn_config_validate(const tpgn_config* cfg);
// 40 hex digits plus NUL.
TPGN_API tpgn_status tpgn_config_hash(const tpgn_config* cfg, char out[41]);

// Results of a command: named numbers, text outputs and a CSV table.
TPGN_API void tpgn_result_destroy(tpgn_result* res);
TPGN_API tpgn_status tpgn_result_number(const tpgn_result* res, const char* name, double* out);
// Pointer valid until the result is destroyed; NULL when absent.
TPGN_API const char* tpgn_result_text(const tpgn_result* res, const char* name);

// Loads data, trains, evaluates and writes a run directory. On divergence
// the outputs are still written and TPGN_ERR_DIVERGED is returned with *out
// set. Numbers: test_mse, test_mae, test_mse_original, test_mae_original,
// best_val_loss, best_epoch, epochs, steps. Texts: dir, hash, summary,
// metrics (CSV).
TPGN_API tpgn_status tpgn_train(const tpgn_config* cfg, int verbose, tpgn_result** out);

// Evaluates a checkpoint on the test split of its recorded dataset; keys in
// `overrides` (may be NULL) replace recorded ones. Numbers: test_mse,
// test_mae, test_mse_original, test_mae_original, windows. Texts: dir,
// metrics (CSV).
TPGN_API tpgn_status tpgn_eval(const char* checkpoint_path, const tpgn_config* overrides,
                               int verbose, tpgn_result** out);

// Finite-difference check of every parameter tensor of the model described
// by cfg. Numbers: max_error, tensors. Texts: csv (tensor,max_rel_error).
TPGN_API tpgn_status tpgn_gradcheck(const tpgn_config* cfg, tpgn_result** out);

typedef enum tpgn_bench_model {
  TPGN_BENCH_TPGN = 0,
  TPGN_BENCH_PGN_RAW = 1,
  TPGN_BENCH_GRU_SEQ = 2,
  TPGN_BENCH_LSTM_SEQ = 3,
} tpgn_bench_model;

typedef struct tpgn_bench_scenario {
  tpgn_bench_model model;
  size_t history;
  size_t horizon;
  size_t d_model;
  size_t batch;
  size_t period;
  size_t repeats;
  size_t warmup;
  int forward_only;
} tpgn_bench_scenario;

TPGN_API void tpgn_bench_scenario_default(tpgn_bench_scenario* s);
// Fills up to cap scenarios of the standard sweep and returns how many exist.
TPGN_API size_t tpgn_bench_default_sweep(int forward_only, size_t repeats,
                                         tpgn_bench_scenario* out, size_t cap);
// Runs scenarios serially, writing <dir>/bench.csv (versioned on re-runs).
// Numbers: failed. Texts: path, csv.
TPGN_API tpgn_status tpgn_bench(const tpgn_bench_scenario* scenarios, size_t count,
                                const char* dir, int verbose, tpgn_result** out);

// Writes a "date,value" CSV of an hourly sinusoid with the given period;
// drift stretches the period to period * (1 + drift).
TPGN_API tpgn_status tpgn_synth(const char* path, size_t length, size_t period, double drift);

// Inference on a saved checkpoint.
TPGN_API tpgn_status tpgn_model_load(const char* path, tpgn_model** out);
TPGN_API void tpgn_model_destroy(tpgn_model* model);
TPGN_API size_t tpgn_model_history(const tpgn_model* model);
TPGN_API size_t tpgn_model_horizon(const tpgn_model* model);
TPGN_API size_t tpgn_model_time_features(const tpgn_model* model);
// history: batch x L_h, time_features: batch x L_h x C (row-major),
// out: batch x L_f.
TPGN_API tpgn_status tpgn_model_predict(const tpgn_model* model, const double* history,
                                        const double* time_features, size_t batch, double* out);

// Caps the worker threads used inside one operation (also TPGN_THREADS).
TPGN_API void tpgn_set_threads(size_t n);

#ifdef __cplusplus
}
#endif

#endif  // TPGN_TPGN_H_
