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

#include "tpgn/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <new>

#include "tpgn/baselines.hpp"
#include "tpgn/config.hpp"
#include "tpgn/errors.hpp"
#include "tpgn/graph.hpp"
#include "tpgn/init.hpp"
#include "tpgn/ops.hpp"
#include "tpgn/pgn.hpp"
#include "tpgn/tpgn_model.hpp"

namespace tpgn {

std::string_view bench_model_name(BenchModel m) {
  switch (m) {
    case BenchModel::kTpgn: return "TPGN";
    case BenchModel::kPgnRaw: return "PGN-raw";
    case BenchModel::kGruSeq: return "GRU-seq";
    case BenchModel::kLstmSeq: return "LSTM-seq";
  }
  return "?";
}

BenchModel parse_bench_model(std::string_view name) {
  for (BenchModel m : {BenchModel::kTpgn, BenchModel::kPgnRaw, BenchModel::kGruSeq,
                       BenchModel::kLstmSeq}) {
    if (name == bench_model_name(m)) return m;
  }
  throw ConfigError("unknown bench model '" + std::string(name) + "'");
}

void BenchScenario::validate() const {
  if (repeats < 3) throw ConfigError("bench repeats must be at least 3");
  if (warmup < 1) throw ConfigError("bench warmup must be at least 1");
  if (layers != 1) throw ConfigError("only single-layer models are benchmarked");
  if (history == 0 || horizon == 0 || d_model == 0 || batch == 0) {
    throw ConfigError("bench shapes must be positive");
  }
  if (model == BenchModel::kTpgn &&
      (period == 0 || history % period != 0 || horizon % period != 0)) {
    throw ConfigError("TPGN bench lengths must be multiples of the period");
  }
}

namespace {

using Clock = std::chrono::steady_clock;

// A model instance with its synthetic inputs, able to run one step.
class Workload {
 public:
  explicit Workload(const BenchScenario& s) : s_(s), rng_(s.seed) {
    const std::size_t B = s.batch, L = s.history, d = s.d_model;
    target_ = random({B, s.horizon});
    if (s.model == BenchModel::kTpgn) {
      ModelConfig cfg;
      cfg.history = L;
      cfg.horizon = s.horizon;
      cfg.period = s.period;
      cfg.d_model = d;
      tpgn_ = TpgnParams::init(cfg, rng_);
      history_ = random({B, L});
      features_ = random({B, L, cfg.time_features});
      return;
    }
    x_ = random({B, L, 1});
    switch (s.model) {
      case BenchModel::kPgnRaw: pgn_ = PgnParams::init(L, 1, d, rng_); break;
      case BenchModel::kGruSeq: gru_ = GruParams::init(1, d, rng_); break;
      case BenchModel::kLstmSeq: lstm_ = LstmParams::init(1, d, rng_); break;
      default: break;
    }
    w_head_ = init_weight({s.horizon, d}, d, rng_);
    b_head_ = init_bias({s.horizon});
  }

  // One forward (and optionally backward) pass. With `graph`, the input and
  // every parameter are leaves of it.
  Tensor forward(Graph* graph, Tensor* input_leaf = nullptr) {
    const auto track = [&](const Tensor& t) { return graph ? graph->leaf(t) : t; };
    if (s_.model == BenchModel::kTpgn) {
      TpgnParams p = tpgn_;
      if (graph) p.visit([&](const std::string&, Tensor& t) { t = graph->leaf(t); });
      return tpgn_forward(history_, features_, p);
    }
    const Tensor x = track(x_);
    if (input_leaf) *input_leaf = x;
    Tensor states;
    if (s_.model == BenchModel::kPgnRaw) {
      PgnParams p = pgn_;
      PgnParams::visit(p, "", [&](const std::string&, Tensor& t) { t = track(t); });
      states = pgn_forward(x, p).out;
    } else if (s_.model == BenchModel::kGruSeq) {
      GruParams p = gru_;
      GruParams::visit(p, "", [&](const std::string&, Tensor& t) { t = track(t); });
      states = gru_forward_seq(x, p);
    } else {
      LstmParams p = lstm_;
      LstmParams::visit(p, "", [&](const std::string&, Tensor& t) { t = track(t); });
      states = lstm_forward_seq(x, p);
    }
    const std::size_t B = s_.batch, L = s_.history, d = s_.d_model;
    const Tensor last = reshape(slice(states, 1, L - 1, 1), {B, d});
    return affine(last, track(w_head_), track(b_head_));
  }

  void step() {
    if (s_.mode == BenchMode::kForward) {
      sink_ = forward(nullptr).values()[0];
      return;
    }
    Graph graph;
    const Tensor loss = mse_loss(forward(&graph), target_);
    const GradientMap g = graph.backward(loss);
    sink_ = loss.item() + static_cast<double>(g.size());
  }

  std::uint64_t analytic_macs() const {
    if (s_.model != BenchModel::kTpgn) return 0;
    return flop_count(tpgn_.config).total() * s_.batch;
  }

  std::size_t depth() {
    if (s_.model == BenchModel::kTpgn) return tpgn_graph_depth(tpgn_);
    Graph graph;
    Tensor leaf;
    const Tensor out = forward(&graph, &leaf);
    return graph.longest_path(*leaf.node_id(), *out.node_id()).value_or(0);
  }

 private:
  Tensor random(Shape shape) {
    Tensor t(std::move(shape));
    for (double& v : t.mutable_values()) v = rng_.uniform(-1.0, 1.0);
    return t;
  }

  BenchScenario s_;
  Rng rng_;
  TpgnParams tpgn_;
  PgnParams pgn_;
  GruParams gru_;
  LstmParams lstm_;
  Tensor w_head_, b_head_;
  Tensor history_, features_, x_, target_;
  volatile double sink_ = 0.0;
};

}  // namespace

BenchRecord run_scenario(const BenchScenario& s) {
  BenchRecord rec;
  rec.scenario = s;
  try {
    s.validate();
    Workload w(s);
    for (std::size_t i = 0; i < s.warmup; ++i) w.step();
    for (std::size_t i = 0; i < s.repeats; ++i) {
      reset_peak_bytes();
      reset_mac_count();
      const auto start = Clock::now();
      w.step();
      rec.times_ms.push_back(
          std::chrono::duration<double, std::milli>(Clock::now() - start).count());
      rec.peak_bytes = std::max(rec.peak_bytes, memory_stats().peak_bytes);
      rec.measured_macs = mac_count();
    }
    std::vector<double> sorted = rec.times_ms;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    rec.time_ms_median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    if (s.model == BenchModel::kTpgn) {
      rec.macs = w.analytic_macs();
    } else {
      BenchScenario fwd = s;
      fwd.mode = BenchMode::kForward;
      Workload probe(fwd);
      reset_mac_count();
      probe.step();
      rec.macs = mac_count();
    }
    rec.graph_depth = w.depth();
    rec.ok = true;
  } catch (const std::bad_alloc&) {
    rec.ok = false;
    rec.error = "out of memory";
  } catch (const Error& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRecord> records) {
  out << kBenchHeader << '\n';
  for (const BenchRecord& r : records) {
    const BenchScenario& s = r.scenario;
    out << bench_model_name(s.model) << ',' << s.history << ',' << s.horizon << ',' << s.d_model
        << ',' << s.batch << ',';
    if (r.ok) {
      out << format_double(r.time_ms_median) << ',' << r.peak_bytes << ',' << r.macs << ','
          << r.graph_depth;
    } else {
      out << "NA,NA,NA,NA";
    }
    out << '\n';
  }
}

std::filesystem::path sweep(std::span<const BenchScenario> scenarios,
                            const std::filesystem::path& dir, std::vector<BenchRecord>* records,
                            std::ostream* progress) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = versioned_file(dir / "bench.csv");
  std::vector<BenchRecord> done;
  for (const BenchScenario& s : scenarios) {
    done.push_back(run_scenario(s));
    // Rewrite after every scenario so partial sweeps leave a usable file.
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_bench_csv(out, done);
    if (progress) {
      const BenchRecord& r = done.back();
      *progress << bench_model_name(s.model) << " L_h=" << s.history << " L_f=" << s.horizon
                << (r.ok ? " median " + format_double(r.time_ms_median) + " ms"
                         : " failed: " + r.error)
                << '\n';
    }
  }
  if (records) *records = std::move(done);
  return path;
}

std::vector<BenchScenario> default_sweep(BenchMode mode, std::size_t repeats) {
  std::vector<BenchScenario> out;
  const BenchModel models[] = {BenchModel::kTpgn, BenchModel::kPgnRaw, BenchModel::kGruSeq,
                               BenchModel::kLstmSeq};
  const std::size_t lengths[] = {168, 336, 720, 1440};
  const auto add = [&](BenchModel m, std::size_t lh, std::size_t lf) {
    BenchScenario s;
    s.model = m;
    s.history = lh;
    s.horizon = lf;
    s.mode = mode;
    s.repeats = repeats;
    out.push_back(s);
  };
  for (BenchModel m : models) {
    for (std::size_t lf : lengths) add(m, 168, lf);
    for (std::size_t lh : lengths) {
      if (lh != 168) add(m, lh, 1440);
    }
  }
  return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ContractError("loglog_slope needs two or more paired points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace tpgn
