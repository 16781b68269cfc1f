// Copyright 2026 The NeuroView Authors.
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

// Acceptance suite. `acceptance` runs every criterion; `acceptance 3 6`
// runs a subset. Prints one [PASS]/[FAIL] line per criterion and exits
// non-zero when any fails.
//
// Datasets are read from $NV_UCR_DIR, else the bundled data directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "neuroview/checkpoint.h"
#include "neuroview/data.h"
#include "neuroview/interpret.h"
#include "neuroview/text_io.h"
#include "support/oracles.h"

namespace nv {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> info;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string pct(double v) { return fmt("%.2f%%", 100.0 * v); }

std::string join(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

fs::path data_dir() {
  if (const char* env = std::getenv("NV_UCR_DIR")) return env;
  return NV_TEST_DATA_DIR;
}

std::optional<Split> load_dataset(const std::string& name, std::string& missing) {
  const fs::path train = data_dir() / (name + "_TRAIN.tsv");
  const fs::path test = data_dir() / (name + "_TEST.tsv");
  for (const auto& p : {train, test}) {
    if (!fs::exists(p)) {
      missing = p.string();
      return std::nullopt;
    }
  }
  return load_ucr_split(train, test);
}

EncoderConfig encoder(CellKind cell, std::size_t m, std::size_t n, std::size_t T,
                      std::size_t layers = 1, bool bidir = false) {
  EncoderConfig e;
  e.cell = cell;
  e.input_dim = m;
  e.hidden_dim = n;
  e.horizon = T;
  e.layers = layers;
  e.bidirectional = bidir;
  return e;
}

struct TrainedModel {
  std::uint64_t seed = 0;
  Model model;
  double test_accuracy = 0.0;
};

TrainedModel train_model(const Split& data, HeadKind head, std::size_t hidden,
                         std::size_t epochs, std::uint64_t seed) {
  ModelSpec spec;
  spec.encoder = encoder(CellKind::kGru, data.train.feature_dim, hidden, data.train.horizon);
  spec.head = head;
  spec.num_classes = data.train.num_classes;
  TrainConfig cfg;
  cfg.adam.learning_rate = 1e-3;
  cfg.epochs = epochs;
  cfg.seed = seed;
  TrainedModel out;
  out.seed = seed;
  out.model = fit(data.train, cfg, spec).model;
  out.test_accuracy = evaluate(out.model, data.test).overall_accuracy;
  return out;
}

// NV-GRU32, lr 1e-3, 1000 full-batch epochs, seeds 0..2. Returns all three;
// `best` is the highest test accuracy, lowest seed on ties.
struct SeedSweep {
  std::vector<TrainedModel> runs;
  std::size_t best = 0;
};

SeedSweep seed_sweep(const Split& data) {
  SeedSweep s;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    s.runs.push_back(train_model(data, HeadKind::kNeuroView, 32, 1000, seed));
    if (s.runs.back().test_accuracy > s.runs[s.best].test_accuracy) s.best = s.runs.size() - 1;
  }
  return s;
}

std::string sweep_summary(const SeedSweep& s) {
  std::string out;
  for (const auto& r : s.runs) {
    out += (out.empty() ? "" : " ") + ("seed" + std::to_string(r.seed)) + "=" + pct(r.test_accuracy);
  }
  return out;
}

// Chinatown is shared by criteria 3, 6, 7 and 10; train it once per process.
const SeedSweep* chinatown(std::string& error) {
  static std::optional<SeedSweep> cache;
  static std::optional<Split> data;
  static std::string missing;
  if (!data && missing.empty()) {
    data = load_dataset("Chinatown", missing);
    if (data) cache = seed_sweep(*data);
  }
  if (!cache) {
    error = "dataset not found: " + missing;
    return nullptr;
  }
  return &*cache;
}

const Split& chinatown_data() {
  static const Split data = load_ucr_split(data_dir() / "Chinatown_TRAIN.tsv",
                                           data_dir() / "Chinatown_TEST.tsv");
  return data;
}

Outcome gradient_correctness() {
  // Every entry's error; relative with the floor, plus the pure relative
  // error over entries with |g| >= floor and the absolute error below it.
  double worst = 0.0, worst_rel_large = 0.0, worst_abs_small = 0.0;
  std::string worst_at;
  std::size_t checked = 0;
  Rng rng(20260);
  for (CellKind cell : {CellKind::kSimpleRnn, CellKind::kGru, CellKind::kLstm}) {
    for (HeadKind head : {HeadKind::kLastState, HeadKind::kAveragePool, HeadKind::kNeuroView}) {
      for (int trial = 0; trial < 4; ++trial) {
        const std::size_t n = 1 + rng.below(6);
        const std::size_t m = 1 + rng.below(3);
        const std::size_t T = 1 + rng.below(5);
        const std::size_t d = 2 + rng.below(2);
        const std::size_t layers = 1 + trial / 2;
        const bool bidir = trial % 2 == 1;
        const EncoderConfig e = encoder(cell, m, n, T, layers, bidir);
        Model model = testing::random_model(e, head, d, rng.below(1u << 30), 0.8,
                                            head == HeadKind::kAveragePool && trial % 2 == 0);
        const Matrix x = testing::random_matrix(T, m, rng);
        const std::size_t label = rng.below(d);
        const Gradients g = testing::sample_gradients(model, x, label);
        auto params = model.views();
        const auto analytic = g.views();
        for (std::size_t b = 0; b < params.size(); ++b) {
          for (std::size_t i = 0; i < params[b].values.size(); ++i) {
            double& theta = params[b].values[i];
            const double saved = theta;
            theta = saved + testing::kFdStep;
            const double up = testing::sample_loss(model, x, label);
            theta = saved - testing::kFdStep;
            const double down = testing::sample_loss(model, x, label);
            theta = saved;
            const double numeric = (up - down) / (2.0 * testing::kFdStep);
            const double a = analytic[b].values[i];
            const double err = testing::relative_error(a, numeric);
            const double scale = std::max(std::abs(a), std::abs(numeric));
            if (scale >= testing::kFdScaleFloor) {
              worst_rel_large = std::max(worst_rel_large, err);
            } else {
              worst_abs_small = std::max(worst_abs_small, std::abs(a - numeric));
            }
            if (err >= worst) {
              worst = err;
              worst_at = std::string(to_string(cell)) + "/" + std::string(to_string(head)) + " " +
                         params[b].name + "[" + std::to_string(i) + "]";
            }
            ++checked;
          }
        }
      }
    }
  }
  Outcome o;
  o.pass = worst < testing::kFdTolerance;
  o.detail = std::to_string(checked) + " entries, max rel err " + fmt("%.3e", worst) + " at " +
             worst_at + " (|g|>=1e-4: " + fmt("%.3e", worst_rel_large) +
             ", |g|<1e-4 abs: " + fmt("%.3e", worst_abs_small) + "), tol 1e-6";
  return o;
}

Outcome decomposition_identity() {
  Rng rng(91);
  double worst = 0.0;
  for (int pass = 0; pass < 100; ++pass) {
    const CellKind cell = static_cast<CellKind>(rng.below(3));
    const std::size_t m = 1 + rng.below(3);
    const std::size_t T = 1 + rng.below(12);
    const EncoderConfig e = encoder(cell, m, 1 + rng.below(8), T, 1 + rng.below(2), rng.below(2) == 1);
    const Model model =
        testing::random_model(e, HeadKind::kNeuroView, 2 + rng.below(4), rng.below(1u << 30), 1.0);
    const ForwardTrace tr = forward(model, testing::random_matrix(T, m, rng, 2.0));
    for (std::size_t i = 0; i < model.num_classes(); ++i) {
      double sum = 0.0;
      for (const Vector& f : tr.contributions) sum += f[i];
      worst = std::max(worst, std::abs(tr.logits[i] - sum));
    }
  }
  return {worst < 1e-10, "100 passes, max |logits - sum_t f(t)| = " + fmt("%.3e", worst) +
                             ", tol 1e-10"};
}

Outcome chinatown_reproduction() {
  std::string error;
  const SeedSweep* s = chinatown(error);
  if (s == nullptr) return {false, error};
  const TrainedModel& best = s->runs[s->best];
  Outcome o;
  o.pass = best.test_accuracy >= 0.94;
  o.detail = "NV-GRU32 best test acc " + pct(best.test_accuracy) + " (seed " +
             std::to_string(best.seed) + "; " + sweep_summary(*s) + "), need >= 94.00%";
  // Soft check: class 0 is expected to weigh steps 4..7 most.
  const WeightMap map = weight_map(best.model.head, best.model.encoder, 0);
  const auto top = rank_timesteps(map, 4, CounterfactualMode::kTopPositive);
  bool inside = true;
  for (std::size_t t : top) inside = inside && t >= 4 && t <= 7;
  o.info.push_back("class 0 top-4 timesteps " + join(top) +
                   (inside ? " (within 4..7)" : " (expected within 4..7)"));
  return o;
}

Outcome wine_umd_reproduction() {
  Outcome o;
  o.pass = true;
  for (const char* name : {"Wine", "UMD"}) {
    std::string missing;
    const auto data = load_dataset(name, missing);
    if (!data) {
      o.pass = false;
      o.detail += std::string(o.detail.empty() ? "" : "; ") + name + ": dataset not found: " + missing;
      continue;
    }
    const SeedSweep s = seed_sweep(*data);
    const double acc = s.runs[s.best].test_accuracy;
    o.pass = o.pass && acc >= 0.95;
    o.detail += std::string(o.detail.empty() ? "" : "; ") + name + " best " + pct(acc) + " (" +
                sweep_summary(s) + ")";
  }
  o.detail += ", need >= 95.00% each";
  return o;
}

Outcome head_ordering() {
  Split data;
  data.train = synth_separable(3, 24, 1, 20, 0);
  data.test = synth_separable(3, 24, 1, 50, 1);
  double nv_mean = 0.0, last_mean = 0.0;
  std::string per_seed;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const double a = train_model(data, HeadKind::kNeuroView, 32, 300, seed).test_accuracy;
    const double b = train_model(data, HeadKind::kLastState, 32, 300, seed).test_accuracy;
    nv_mean += a / 3.0;
    last_mean += b / 3.0;
    per_seed += " seed" + std::to_string(seed) + " " + pct(a) + "/" + pct(b);
  }
  return {nv_mean >= last_mean, "mean test acc NV " + pct(nv_mean) + " vs LastState " +
                                    pct(last_mean) + " (NV/last:" + per_seed + ")"};
}

Outcome counterfactual_direction() {
  std::string error;
  const SeedSweep* s = chinatown(error);
  if (s == nullptr) return {false, error};
  const TrainedModel& best = s->runs[s->best];
  const DataSet& test = chinatown_data().test;
  const auto k0 = class_targeted_analysis(best.model, test, 0, CounterfactualMode::kTopPositive);
  const auto k5 = class_targeted_analysis(best.model, test, 5, CounterfactualMode::kTopPositive);
  const double drop = k0.overall_accuracy - k5.overall_accuracy;
  Outcome o;
  o.pass = drop >= 0.20;
  o.detail = "seed " + std::to_string(best.seed) + " TopPositive k=0 " + pct(k0.overall_accuracy) +
             " -> k=5 " + pct(k5.overall_accuracy) + ", drop " + fmt("%.2f", 100.0 * drop) +
             " points, need >= 20";
  for (std::size_t c = 0; c < k5.zeroed_steps.size(); ++c) {
    o.info.push_back("class " + std::to_string(c) + " zeroed steps " + join(k5.zeroed_steps[c]));
  }
  return o;
}

Outcome negative_counterfactual() {
  std::string error;
  const SeedSweep* s = chinatown(error);
  if (s == nullptr) return {false, error};
  const TrainedModel& best = s->runs[s->best];
  const DataSet& test = chinatown_data().test;
  const double base =
      time_analysis(best.model, test, 0, 0, CounterfactualMode::kTopNegative).report.per_class_accuracy[0];
  Outcome o;
  o.pass = true;
  o.detail = "seed " + std::to_string(best.seed) + " class 0 TopNegative k=0 " + pct(base);
  for (std::size_t k : {1, 5}) {
    const double acc = time_analysis(best.model, test, 0, k, CounterfactualMode::kTopNegative)
                           .report.per_class_accuracy[0];
    const double change = acc - base;
    o.pass = o.pass && change >= -0.02;
    o.detail += ", k=" + std::to_string(k) + " " + pct(acc) + " (" + fmt("%+.2f", 100.0 * change) + ")";
  }
  o.detail += "; need change >= -2 points";
  return o;
}

Outcome initialization() {
  double worst = 0.0;
  for (std::size_t n : {1, 2, 5, 16, 32, 64, 128}) {
    for (CellKind cell : {CellKind::kSimpleRnn, CellKind::kGru, CellKind::kLstm}) {
      const CellParams p = init_params(cell, 3, n, InitScheme{InitKind::kOrthogonal, n * 7 + 1});
      for (const Matrix& w : p.hidden_weights) {
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += w(k, i) * w(k, j);
            worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
          }
        }
      }
    }
  }
  bool identity = true;
  for (CellKind cell : {CellKind::kSimpleRnn, CellKind::kGru, CellKind::kLstm}) {
    const CellParams p = init_params(cell, 2, 9, InitScheme{InitKind::kIdentity, 3});
    for (const Matrix& w : p.hidden_weights) identity = identity && w == Matrix::identity(9);
  }
  bool deterministic = true;
  for (InitKind k : {InitKind::kUniform, InitKind::kOrthogonal, InitKind::kIdentity, InitKind::kNormal}) {
    ModelSpec spec;
    spec.encoder = encoder(CellKind::kLstm, 2, 6, 8, 2, true);
    spec.num_classes = 3;
    spec.init = k;
    deterministic = deterministic && init_model(spec, 5) == init_model(spec, 5);
  }
  // Training with shuffled minibatches is also bit-reproducible.
  const DataSet data = synth_separable(2, 12, 1, 10, 2);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 3;
  cfg.seed = 11;
  ModelSpec spec;
  spec.encoder = encoder(CellKind::kGru, 1, 5, 12);
  const TrainResult a = fit(data, cfg, spec);
  const TrainResult b = fit(data, cfg, spec);
  deterministic = deterministic && a.model == b.model && a.optimizer == b.optimizer;
  return {worst < 1e-10 && identity && deterministic,
          "orthogonal max|W^T W - I| " + fmt("%.3e", worst) + " (tol 1e-10), identity " +
              (identity ? "exact" : "NOT exact") + ", same-seed runs " +
              (deterministic ? "bit-identical" : "DIFFER")};
}

Outcome reversal_duality() {
  Rng rng(4242);
  std::size_t mismatches = 0, compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const CellKind cell = static_cast<CellKind>(trial % 3);
    const std::size_t m = 1 + rng.below(3);
    const std::size_t T = 1 + rng.below(10);
    const EncoderConfig e = encoder(cell, m, 1 + rng.below(6), T, 1, true);
    Model model = testing::random_model(e, static_cast<HeadKind>(rng.below(3)), 2, rng.below(1u << 30));
    model.cells[1] = model.cells[0];
    const Matrix x = testing::random_matrix(T, m, rng, 2.0);
    Matrix rev(T, m);
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t j = 0; j < m; ++j) rev(t, j) = x(T - 1 - t, j);
    }
    const ForwardTrace a = forward(model, x);
    const ForwardTrace b = forward(model, rev);
    for (std::size_t t = 0; t < T; ++t) {
      compared += 2;
      if (!(b.hidden(0, t) == a.hidden(1, T - 1 - t))) ++mismatches;
      if (!(b.hidden(1, t) == a.hidden(0, T - 1 - t))) ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(compared) + " hidden states compared, " +
                               std::to_string(mismatches) + " not bit-identical"};
}

Outcome checkpoint_round_trip() {
  std::string error;
  const SeedSweep* s = chinatown(error);
  if (s == nullptr) return {false, error};
  const DataSet& test = chinatown_data().test;
  const fs::path dir = fs::temp_directory_path() / "nv_acceptance_checkpoint";
  std::size_t differing = 0, samples = 0;
  bool bytes_equal = true;
  for (const auto& run : s->runs) {
    Checkpoint ck;
    ck.model = run.model;
    ck.seed = run.seed;
    ck.label_values = chinatown_data().train.label_values;
    const fs::path path = dir / ("seed" + std::to_string(run.seed) + ".json");
    save_checkpoint(ck, path);
    const Checkpoint back = load_checkpoint(path);
    bytes_equal = bytes_equal && checkpoint_to_json(back) == read_file(path);
    for (const auto& sample : test.samples) {
      ++samples;
      const Prediction p = predict(run.model, sample.features);
      const Prediction q = predict(back.model, sample.features);
      if (!(p.logits == q.logits) || p.label != q.label) ++differing;
    }
  }
  fs::remove_all(dir);
  return {differing == 0 && bytes_equal,
          std::to_string(samples) + " test predictions over 3 checkpoints, " +
              std::to_string(differing) + " differ; re-serialised file " +
              (bytes_equal ? "byte-identical" : "DIFFERS")};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace nv

int main(int argc, char** argv) {
  using namespace nv;
  const std::vector<Criterion> criteria{
      {"gradient correctness", gradient_correctness},
      {"decomposition identity", decomposition_identity},
      {"Chinatown reproduction", chinatown_reproduction},
      {"Wine and UMD reproduction", wine_umd_reproduction},
      {"head ordering", head_ordering},
      {"counterfactual direction", counterfactual_direction},
      {"negative counterfactual", negative_counterfactual},
      {"initialization properties", initialization},
      {"bidirectional reversal duality", reversal_duality},
      {"checkpoint round trip", checkpoint_round_trip},
  };
  std::vector<std::size_t> selected;
  for (int i = 1; i < argc; ++i) {
    const long v = std::strtol(argv[i], nullptr, 10);
    if (v < 1 || v > static_cast<long>(criteria.size())) {
      std::fprintf(stderr, "usage: %s [criterion 1-%zu ...]\n", argv[0], criteria.size());
      return 2;
    }
    selected.push_back(static_cast<std::size_t>(v));
  }
  if (selected.empty()) {
    for (std::size_t i = 1; i <= criteria.size(); ++i) selected.push_back(i);
  }
  int failures = 0;
  for (std::size_t id : selected) {
    const Criterion& c = criteria[id - 1];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what(), {}};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %zu (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, c.name,
                o.detail.c_str(), secs);
    for (const auto& line : o.info) std::printf("       info: %s\n", line.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
