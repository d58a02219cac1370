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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tpgn/data.hpp"
#include "tpgn/tensor.hpp"
#include "tpgn/tpgn_model.hpp"

namespace tpgn {

struct TrainConfig {
  double lr = 1e-3;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 25;
  std::size_t patience = 5;
  std::uint64_t seed = 2023;
  std::size_t max_steps = 0;  // optimizer step budget; 0 = unlimited
  double noise_eps = 0.0;     // fraction of each training history perturbed

  void validate() const;
};

double mse(std::span<const double> pred, std::span<const double> target);
double mae(std::span<const double> pred, std::span<const double> target);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t t = 0;
  std::vector<std::vector<double>> m, v;

  static AdamState for_params(std::span<const Tensor* const> params);
};

// One bias-corrected Adam update. Throws NumericError, leaving params and
// state untouched, when any gradient is non-finite.
void adam_step(std::span<Tensor* const> params, std::span<const Tensor> grads, AdamState& state,
               double lr);

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double elapsed_seconds = 0.0;
};

struct Metrics {
  double mse = 0.0;
  double mae = 0.0;
  std::size_t windows = 0;
};

struct FitResult {
  TpgnParams best;
  double best_val_loss = 0.0;
  std::size_t best_epoch = 0;  // 0 when no epoch finished
  std::vector<EpochLog> log;
  std::size_t steps = 0;
  bool diverged = false;
  std::string message;
};

using EpochCallback = std::function<void(const EpochLog&)>;

// Minibatch Adam on the L2 loss of model-output-unit predictions, with
// per-epoch shuffling, validation after each epoch and early stopping on
// `patience` epochs without a strictly lower validation loss.
FitResult fit(const TpgnParams& init, const WindowSet& train, const WindowSet& val,
              const TrainConfig& cfg, const EpochCallback& on_epoch = {});

// Predictions for windows [first, first + count), shape [count, L_f].
Tensor predict(const TpgnParams& params, const WindowSet& windows, std::size_t first,
               std::size_t count);

Metrics evaluate(const TpgnParams& params, const WindowSet& windows, std::size_t batch = 128);

// Deterministic per-window noise stream used for training inputs.
void perturb_history(std::span<double> history, double epsilon, std::uint64_t seed,
                     std::size_t window_index);

}  // namespace tpgn
