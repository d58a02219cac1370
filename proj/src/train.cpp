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

#include "tpgn/train.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "tpgn/errors.hpp"
#include "tpgn/graph.hpp"
#include "tpgn/ops.hpp"

namespace tpgn {

void TrainConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (max_epochs == 0) throw ConfigError("max_epochs must be positive");
  if (patience == 0) {
    throw ConfigError("patience must be at least 1");
  }
  if (!(noise_eps >= 0.0 && noise_eps <= 1.0)) {
    throw ConfigError("noise_eps must lie in [0, 1]");
  }
}

namespace {

void check_pair(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) {
    throw ContractError("prediction and target lengths differ (" + std::to_string(pred.size()) +
                        " vs " + std::to_string(target.size()) + ")");
  }
  if (pred.empty()) throw ContractError("metrics need at least one value");
}

using Clock = std::chrono::steady_clock;

std::vector<Tensor*> collect(TpgnParams& p) {
  std::vector<Tensor*> out;
  p.visit([&](const std::string&, Tensor& t) { out.push_back(&t); });
  return out;
}

}  // namespace

double mse(std::span<const double> pred, std::span<const double> target) {
  check_pair(pred, target);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - target[i]) * (pred[i] - target[i]);
  return s / static_cast<double>(pred.size());
}

double mae(std::span<const double> pred, std::span<const double> target) {
  check_pair(pred, target);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - target[i]);
  return s / static_cast<double>(pred.size());
}

AdamState AdamState::for_params(std::span<const Tensor* const> params) {
  AdamState s;
  for (const Tensor* p : params) {
    s.m.emplace_back(p->size(), 0.0);
    s.v.emplace_back(p->size(), 0.0);
  }
  return s;
}

void adam_step(std::span<Tensor* const> params, std::span<const Tensor> grads, AdamState& state,
               double lr) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw ContractError("adam_step: parameter, gradient and state counts differ");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (grads[k].shape() != params[k]->shape()) {
      throw DimensionError("adam_step: gradient " + to_string(grads[k].shape()) +
                           " for parameter " + to_string(params[k]->shape()));
    }
    if (!grads[k].all_finite()) {
      throw NumericError("non-finite gradient in parameter tensor " + std::to_string(k));
    }
  }
  ++state.t;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto theta = params[k]->mutable_values();
    const auto g = grads[k].values();
    auto& m = state.m[k];
    auto& v = state.v[k];
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      theta[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

void perturb_history(std::span<double> history, double epsilon, std::uint64_t seed,
                     std::size_t window_index) {
  if (epsilon == 0.0) return;
  Rng rng(seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(window_index) + 1)));
  inject_noise(history, epsilon, rng);
}

Tensor predict(const TpgnParams& params, const WindowSet& windows, std::size_t first,
               std::size_t count) {
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), first);
  const WindowSet::Batch b = windows.batch(idx);
  return tpgn_forward(b.history, b.time_features, params);
}

Metrics evaluate(const TpgnParams& params, const WindowSet& windows, std::size_t batch) {
  if (windows.history() != params.config.history || windows.horizon() != params.config.horizon) {
    throw ConfigError("windows are " + std::to_string(windows.history()) + "->" +
                      std::to_string(windows.horizon()) + " but the model expects " +
                      std::to_string(params.config.history) + "->" +
                      std::to_string(params.config.horizon));
  }
  const std::size_t n = windows.size();
  if (n == 0) throw ContractError("evaluate: no windows");
  if (batch == 0) batch = 1;
  double se = 0.0, ae = 0.0;
  for (std::size_t first = 0; first < n; first += batch) {
    const std::size_t count = std::min(batch, n - first);
    const Tensor pred = predict(params, windows, first, count);
    const auto p = pred.values();
    for (std::size_t w = 0; w < count; ++w) {
      const auto y = windows.values().subspan(first + w + windows.history(), windows.horizon());
      for (std::size_t j = 0; j < y.size(); ++j) {
        const double e = p[w * y.size() + j] - y[j];
        se += e * e;
        ae += std::abs(e);
      }
    }
  }
  const double total = static_cast<double>(n * windows.horizon());
  return {se / total, ae / total, n};
}

FitResult fit(const TpgnParams& init, const WindowSet& train, const WindowSet& val,
              const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  if (train.size() == 0 || val.size() == 0) {
    throw ConfigError("fit needs at least one training and one validation window");
  }
  TpgnParams params = init;
  std::vector<Tensor*> slots = collect(params);
  AdamState adam = AdamState::for_params(slots);
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  FitResult result;
  result.best = params;
  result.best_val_loss = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  const auto budget_left = [&] { return cfg.max_steps == 0 || result.steps < cfg.max_steps; };

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs && budget_left(); ++epoch) {
    const auto start = Clock::now();
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t first = 0; first < order.size() && budget_left(); first += cfg.batch_size) {
      const std::size_t count = std::min(cfg.batch_size, order.size() - first);
      const std::span<const std::size_t> idx(order.data() + first, count);
      WindowSet::Batch b = train.batch(idx);
      if (cfg.noise_eps > 0.0) {
        auto h = b.history.mutable_values();
        for (std::size_t k = 0; k < count; ++k) {
          perturb_history(h.subspan(k * train.history(), train.history()), cfg.noise_eps, cfg.seed,
                          idx[k]);
        }
      }

      Graph graph;
      TpgnParams live = params;
      live.visit([&](const std::string&, Tensor& t) { t = graph.leaf(t); });
      const Tensor pred = tpgn_forward(b.history, b.time_features, live);
      const Tensor loss = mse_loss(pred, b.target);
      const double value = loss.item();
      if (!std::isfinite(value)) {
        result.diverged = true;
        result.message = "non-finite training loss at step " + std::to_string(result.steps + 1);
        return result;
      }
      const GradientMap grads = graph.backward(loss);
      std::vector<Tensor> g;
      live.visit([&](const std::string&, const Tensor& t) { g.push_back(grads.of(t)); });
      try {
        adam_step(slots, g, adam, cfg.lr);
      } catch (const NumericError& e) {
        result.diverged = true;
        result.message = std::string(e.what()) + " at step " + std::to_string(result.steps + 1);
        return result;
      }
      ++result.steps;
      loss_sum += value * static_cast<double>(count);
      seen += count;
    }

    EpochLog row;
    row.epoch = epoch;
    row.train_loss = seen ? loss_sum / static_cast<double>(seen) : 0.0;
    row.val_loss = evaluate(params, val).mse;
    row.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    result.log.push_back(row);
    if (on_epoch) on_epoch(row);
    if (!std::isfinite(row.val_loss)) {
      result.diverged = true;
      result.message = "non-finite validation loss in epoch " + std::to_string(epoch);
      return result;
    }
    if (row.val_loss < result.best_val_loss) {
      result.best_val_loss = row.val_loss;
      result.best_epoch = epoch;
      result.best = params;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  return result;
}

}  // namespace tpgn
