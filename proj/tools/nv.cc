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

// nv: train, evaluate and interpret recurrent classifiers with a NeuroView
// head.
//
// Exit codes: 0 success, 1 runtime or numerical failure, 2 usage or config
// error.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "neuroview/checkpoint.h"
#include "neuroview/data.h"
#include "neuroview/interpret.h"
#include "neuroview/network.h"
#include "neuroview/text_io.h"
#include "neuroview/train.h"

namespace nv {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string fixed(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string join(const std::vector<std::size_t>& xs, const char* sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(xs[i]);
  }
  return out;
}

// Config keys given on the command line, applied over the config file.
struct ConfigFlags {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> values;

  bool has(const std::string& key) const {
    return std::any_of(values.begin(), values.end(),
                       [&](const auto& kv) { return kv.first == key; });
  }
};

void value_option(CLI::App* app, ConfigFlags& flags, const std::string& name,
                  const std::string& key, const std::string& type, const std::string& help) {
  app->add_option_function<std::string>(
         name, [&flags, key](const std::string& v) { flags.values.emplace_back(key, v); }, help)
      ->type_name(type);
}

void switch_option(CLI::App* app, ConfigFlags& flags, const std::string& name,
                   const std::string& key, const std::string& help) {
  app->add_flag_function(
      name, [&flags, key](std::int64_t) { flags.values.emplace_back(key, "true"); }, help);
}

void add_data_options(CLI::App* app, ConfigFlags& flags, std::string& data_dir) {
  value_option(app, flags, "--dataset", "dataset", "NAME",
               "UCR dataset name; resolves to <NAME>_TRAIN.tsv and <NAME>_TEST.tsv "
               "(case-insensitive) in the data directory");
  value_option(app, flags, "--train", "train_path", "PATH", "training split file");
  value_option(app, flags, "--test", "test_path", "PATH", "test split file");
  app->add_option("--data-dir", data_dir,
                  "directory searched by --dataset (default: $NV_UCR_DIR, else the "
                  "bundled data/ucr)");
}

void add_run_options(CLI::App* app, ConfigFlags& flags, std::string& data_dir) {
  app->add_option("--config", flags.config_path,
                  "run config file (key = value); flags override its values")
      ->check(CLI::ExistingFile);
  add_data_options(app, flags, data_dir);
  value_option(app, flags, "--cell", "cell", "rnn|gru|lstm", "recurrent cell (default gru)");
  value_option(app, flags, "--head", "head", "nv|last|avg", "classifier head (default nv)");
  value_option(app, flags, "--hidden", "hidden_dim", "N", "hidden state size (default 32)");
  value_option(app, flags, "--layers", "layers", "N", "stacked layers (default 1)");
  switch_option(app, flags, "--bidirectional", "bidirectional", "add a reverse-time cell per layer");
  switch_option(app, flags, "--mean-pool", "mean_pool", "avg head: divide the sum by T");
  value_option(app, flags, "--init", "init", "uniform|orthogonal|identity|normal",
               "hidden-to-hidden initialisation (default uniform)");
  value_option(app, flags, "--horizon", "horizon", "T",
               "pad or truncate sequences to T steps (default: longest train sequence)");
  switch_option(app, flags, "--znorm", "znorm", "z-normalise every series after loading");
  value_option(app, flags, "--lr", "learning_rate", "X", "Adam learning rate (default 0.001)");
  value_option(app, flags, "--beta1", "beta1", "X", "Adam beta1 (default 0.9)");
  value_option(app, flags, "--beta2", "beta2", "X", "Adam beta2 (default 0.999)");
  value_option(app, flags, "--epsilon", "epsilon", "X", "Adam epsilon (default 1e-8)");
  value_option(app, flags, "--epochs", "epochs", "N", "training epochs (default 1000)");
  value_option(app, flags, "--batch-size", "batch_size", "N", "minibatch size; 0 = full batch (default)");
  value_option(app, flags, "--seed", "seed", "N", "seed for init and shuffling (NV_SEED overrides)");
  value_option(app, flags, "--clip-norm", "clip_norm", "X", "global gradient-norm clip; 0 disables");
  value_option(app, flags, "--out", "output_dir", "DIR", "output directory (default runs)");
}

RunConfig build_config(const ConfigFlags& flags) {
  RunConfig cfg = flags.config_path.empty() ? RunConfig() : load_run_config(flags.config_path);
  for (const auto& [key, value] : flags.values) cfg.set(key, value);
  if (const char* env = std::getenv("NV_SEED")) {
    try {
      cfg.set("seed", env);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("NV_SEED: ") + e.what());
    }
  }
  cfg.train.validate();
  return cfg;
}

fs::path data_directory(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("NV_UCR_DIR")) return env;
  return NV_DEFAULT_DATA_DIR;
}

std::optional<fs::path> find_nocase(const fs::path& dir, const std::string& name) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return std::nullopt;
  const std::string want = lower(name);
  std::vector<fs::path> hits;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (lower(entry.path().filename().string()) == want) hits.push_back(entry.path());
  }
  if (hits.empty()) return std::nullopt;
  std::sort(hits.begin(), hits.end());
  return hits.front();
}

// Fills train_path/test_path from the dataset name when no explicit paths
// were given, and checks that the files exist.
void resolve_paths(RunConfig& cfg, const std::string& data_dir) {
  if (cfg.train_path.empty() && cfg.test_path.empty()) {
    if (cfg.dataset.empty()) {
      throw UsageError("no dataset given: pass --dataset NAME or --train PATH");
    }
    const fs::path dir = data_directory(data_dir);
    const auto train = find_nocase(dir, cfg.dataset + "_TRAIN.tsv");
    const auto test = find_nocase(dir, cfg.dataset + "_TEST.tsv");
    if (!train || !test) {
      throw UsageError("dataset '" + cfg.dataset + "' not found in " + dir.string() +
                       " (looked for " + cfg.dataset + "_TRAIN.tsv and " + cfg.dataset +
                       "_TEST.tsv)");
    }
    cfg.train_path = train->string();
    cfg.test_path = test->string();
  }
  for (const std::string* p : {&cfg.train_path, &cfg.test_path}) {
    std::error_code ec;
    if (!p->empty() && !fs::is_regular_file(*p, ec)) {
      throw UsageError("dataset file not found: " + *p);
    }
  }
}

struct TrainingData {
  DataSet train;
  std::optional<DataSet> test;
};

// Loads the splits named by cfg and fixes cfg's horizon and input_dim from
// the data when they are 0.
TrainingData load_training_data(RunConfig& cfg, const std::string& data_dir) {
  resolve_paths(cfg, data_dir);
  if (cfg.train_path.empty()) throw UsageError("training needs a train split (--train or --dataset)");
  TrainingData out;
  if (cfg.test_path.empty()) {
    out.train = load_ucr(cfg.train_path);
  } else {
    Split split = load_ucr_split(cfg.train_path, cfg.test_path);
    out.train = std::move(split.train);
    out.test = std::move(split.test);
  }
  if (cfg.znorm) {
    znormalize(out.train);
    if (out.test) znormalize(*out.test);
  }
  if (cfg.encoder.horizon == 0) cfg.encoder.horizon = out.train.horizon;
  pad_dataset(out.train, cfg.encoder.horizon);
  if (out.test) pad_dataset(*out.test, cfg.encoder.horizon);
  if (cfg.encoder.input_dim == 0) {
    cfg.encoder.input_dim = out.train.feature_dim;
  } else if (cfg.encoder.input_dim != out.train.feature_dim) {
    throw UsageError("input_dim = " + std::to_string(cfg.encoder.input_dim) + " but " +
                     cfg.train_path + " has " + std::to_string(out.train.feature_dim) +
                     " features per step");
  }
  return out;
}

struct RunOutcome {
  std::size_t hidden_dim = 0;
  double train_accuracy = 0.0;
  std::optional<double> test_accuracy;
  fs::path checkpoint;
};

RunOutcome train_and_save(const RunConfig& cfg, const TrainingData& data, const fs::path& dir) {
  ModelSpec spec;
  spec.encoder = cfg.encoder;
  spec.head = cfg.head;
  spec.mean_pool = cfg.mean_pool;
  spec.num_classes = data.train.num_classes;
  spec.init = cfg.init;
  TrainResult result = fit(data.train, cfg.train, spec);

  RunOutcome out;
  out.hidden_dim = cfg.encoder.hidden_dim;
  Checkpoint ck;
  ck.config = cfg;
  ck.seed = cfg.train.seed;
  ck.label_values = data.train.label_values;
  out.train_accuracy = evaluate(result.model, data.train).overall_accuracy;
  ck.metrics["train_accuracy"] = out.train_accuracy;
  ck.metrics["epochs"] = static_cast<double>(result.history.size());
  if (!result.history.empty()) ck.metrics["final_loss"] = result.history.back().mean_loss;
  if (data.test) {
    out.test_accuracy = evaluate(result.model, *data.test).overall_accuracy;
    ck.metrics["test_accuracy"] = *out.test_accuracy;
  }
  ck.model = std::move(result.model);
  ck.optimizer = std::move(result.optimizer);

  fs::create_directories(dir);
  out.checkpoint = dir / "checkpoint.json";
  save_checkpoint(ck, out.checkpoint);
  write_history_csv(result.history, dir / "history.csv");
  save_run_config(cfg, dir / "config.txt");
  return out;
}

std::string accuracy_line(const RunOutcome& r) {
  std::string line = "hidden=" + std::to_string(r.hidden_dim) +
                     " train_acc=" + fixed(r.train_accuracy);
  if (r.test_accuracy) line += " test_acc=" + fixed(*r.test_accuracy);
  return line;
}

int cmd_train(const ConfigFlags& flags, const std::string& data_dir) {
  RunConfig cfg = build_config(flags);
  const TrainingData data = load_training_data(cfg, data_dir);
  const RunOutcome r = train_and_save(cfg, data, cfg.output_dir);
  std::cout << accuracy_line(r) << "\n";
  std::cout << "checkpoint: " << r.checkpoint.string() << "\n";
  return 0;
}

int cmd_sweep(const ConfigFlags& flags, const std::string& data_dir,
              const std::vector<std::size_t>& sizes) {
  std::set<std::size_t> seen;
  for (std::size_t s : sizes) {
    if (s == 0) throw UsageError("--sizes: hidden size must be >= 1");
    if (!seen.insert(s).second) {
      throw UsageError("--sizes: duplicate hidden size " + std::to_string(s));
    }
  }
  RunConfig cfg = build_config(flags);
  const TrainingData data = load_training_data(cfg, data_dir);
  if (!data.test) throw UsageError("sweep ranks sizes by test accuracy and needs a test split");

  const fs::path base = cfg.output_dir;
  std::vector<RunOutcome> rows;
  for (std::size_t s : sizes) {
    RunConfig run = cfg;
    run.encoder.hidden_dim = s;
    rows.push_back(train_and_save(run, data, base / ("h" + std::to_string(s))));
    std::cout << accuracy_line(rows.back()) << "\n";
  }
  const auto best = std::min_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (*a.test_accuracy != *b.test_accuracy) return *a.test_accuracy > *b.test_accuracy;
    return a.hidden_dim < b.hidden_dim;
  });

  std::string table = "hidden_dim,train_accuracy,test_accuracy,checkpoint\n";
  for (const auto& r : rows) {
    table += std::to_string(r.hidden_dim) + "," + format_double(r.train_accuracy) + "," +
             format_double(*r.test_accuracy) + "," + r.checkpoint.string() + "\n";
  }
  write_file(base / "sweep.csv", table);
  fs::copy_file(best->checkpoint, base / "best_checkpoint.json",
                fs::copy_options::overwrite_existing);
  std::cout << "best: hidden=" << best->hidden_dim << " test_acc=" << fixed(*best->test_accuracy)
            << "\n";
  std::cout << "table: " << (base / "sweep.csv").string() << "\n";
  return 0;
}

// Dataset selection for commands that start from a checkpoint.
struct EvalFlags {
  std::string checkpoint;
  ConfigFlags data;
  std::string data_dir;
  std::string split = "test";
};

void add_eval_options(CLI::App* app, EvalFlags& flags) {
  app->add_option("--checkpoint", flags.checkpoint, "checkpoint written by train or sweep")
      ->required()
      ->check(CLI::ExistingFile);
  add_data_options(app, flags.data, flags.data_dir);
  app->add_option("--split", flags.split, "which split to evaluate (default test)")
      ->check(CLI::IsMember({"train", "test"}));
}

DataSet load_eval_data(const Checkpoint& ck, const EvalFlags& flags) {
  RunConfig cfg = ck.config;
  if (!flags.data.values.empty()) {
    cfg.dataset.clear();
    cfg.train_path.clear();
    cfg.test_path.clear();
    for (const auto& [key, value] : flags.data.values) cfg.set(key, value);
  }
  resolve_paths(cfg, flags.data_dir);
  const std::string& path = flags.split == "train" ? cfg.train_path : cfg.test_path;
  if (path.empty()) throw UsageError("no " + flags.split + " split configured for this checkpoint");
  LoadOptions opts;
  opts.label_values = ck.label_values;
  opts.require_two_classes = false;
  DataSet data = load_ucr(path, opts);
  if (ck.config.znorm) znormalize(data);
  pad_dataset(data, ck.model.encoder.horizon);
  if (data.feature_dim != ck.model.encoder.input_dim) {
    throw UsageError(path + " has " + std::to_string(data.feature_dim) +
                     " features per step; the model expects " +
                     std::to_string(ck.model.encoder.input_dim));
  }
  return data;
}

json report_json(const EvalReport& r) {
  return {{"overall_accuracy", r.overall_accuracy},
          {"per_class_accuracy", r.per_class_accuracy},
          {"confusion", r.confusion},
          {"total", r.total}};
}

int cmd_evaluate(const EvalFlags& flags, const std::string& json_path) {
  const Checkpoint ck = load_checkpoint(flags.checkpoint);
  const DataSet data = load_eval_data(ck, flags);
  const EvalReport r = evaluate(ck.model, data);
  std::size_t correct = 0;
  for (std::size_t c = 0; c < r.confusion.size(); ++c) correct += r.confusion[c][c];
  std::cout << "accuracy " << fixed(r.overall_accuracy) << " (" << correct << "/" << r.total
            << ")\n";
  for (std::size_t c = 0; c < r.per_class_accuracy.size(); ++c) {
    std::cout << "class " << c;
    if (c < ck.label_values.size()) std::cout << " (label " << format_double(ck.label_values[c]) << ")";
    std::cout << ": " << fixed(r.per_class_accuracy[c]) << "\n";
  }
  std::cout << "confusion (rows true, columns predicted):\n";
  for (const auto& row : r.confusion) std::cout << "  " << join(row) << "\n";
  if (!json_path.empty()) write_file(json_path, report_json(r).dump(2) + "\n");
  return 0;
}

void require_nv(const Model& model, const char* command) {
  if (model.head.kind != HeadKind::kNeuroView) {
    throw UsageError(std::string(command) +
                     " needs a checkpoint with a NeuroView head (--head nv); this model uses "
                     "the '" + std::string(to_string(model.head.kind)) +
                     "' head, whose weights are not laid out per timestep");
  }
}

std::vector<std::size_t> parse_classes(const std::string& text, std::size_t num_classes) {
  std::vector<std::size_t> out;
  if (lower(text) == "all") {
    for (std::size_t c = 0; c < num_classes; ++c) out.push_back(c);
    return out;
  }
  for (std::string_view field : split(text, ',')) {
    field = trim(field);
    const auto v = parse_double(field);
    if (!v || *v < 0 || *v != static_cast<double>(static_cast<std::size_t>(*v))) {
      throw UsageError("invalid class '" + std::string(field) + "': expected an index or 'all'");
    }
    const auto c = static_cast<std::size_t>(*v);
    if (c >= num_classes) {
      throw UsageError("class " + std::to_string(c) + " out of range: the model has " +
                       std::to_string(num_classes) + " classes");
    }
    if (std::find(out.begin(), out.end(), c) != out.end()) {
      throw UsageError("class " + std::to_string(c) + " listed twice");
    }
    out.push_back(c);
  }
  return out;
}

void check_rank_block(const Model& model, std::size_t block) {
  if (block >= model.encoder.blocks_per_step()) {
    throw UsageError("--rank-block " + std::to_string(block) + " out of range: the model has " +
                     std::to_string(model.encoder.blocks_per_step()) + " blocks per timestep");
  }
}

std::optional<Matrix> try_similarity(const HeadParams& head) {
  if (head.num_classes() < 2) return std::nullopt;
  try {
    return class_similarity(head);
  } catch (const std::invalid_argument& e) {
    std::cerr << "nv: warning: skipping similarity: " << e.what() << "\n";
    return std::nullopt;
  }
}

struct InspectFlags {
  std::string checkpoint;
  std::string classes = "all";
  std::string out;
  std::size_t rank_block = 0;
};

int cmd_inspect(const InspectFlags& flags) {
  const Checkpoint ck = load_checkpoint(flags.checkpoint);
  const Model& model = ck.model;
  require_nv(model, "inspect");
  check_rank_block(model, flags.rank_block);
  const auto classes = parse_classes(flags.classes, model.num_classes());
  std::vector<WeightMap> maps;
  const std::size_t top = std::min<std::size_t>(5, model.encoder.horizon);
  for (std::size_t c : classes) {
    maps.push_back(weight_map(model.head, model.encoder, c));
    const auto steps =
        rank_timesteps(maps.back(), top, CounterfactualMode::kTopPositive, flags.rank_block);
    std::cout << "class " << c << " top-" << top << " timesteps: " << join(steps) << "\n";
  }
  const fs::path dir =
      flags.out.empty() ? fs::path(flags.checkpoint).parent_path() / "inspect" : fs::path(flags.out);
  const ReportFiles files = export_report(maps, model.encoder, try_similarity(model.head), {}, dir);
  std::cout << "wrote " << files.weight_maps.size() << " weight maps";
  if (files.similarity) std::cout << " and " << files.similarity->filename().string();
  std::cout << " to " << dir.string() << "\n";
  return 0;
}

struct CounterfactualFlags {
  EvalFlags eval;
  std::string classes = "all";
  std::vector<std::size_t> ks = {0, 1, 5, 10};
  std::string mode = "top_positive";
  bool zero_weights = false;
  std::size_t rank_block = 0;
  std::string out;
  bool skip = false;  // export only: weight maps and similarity without data
};

void add_counterfactual_options(CLI::App* app, CounterfactualFlags& flags, bool is_export) {
  add_eval_options(app, flags.eval);
  app->add_option(is_export ? "--classes" : "--class", flags.classes,
                  is_export ? "comma-separated class indices or 'all' (default all)"
                            : "class index, comma-separated indices, or 'all' for the "
                              "class-targeted table (default all)");
  app->add_option("--k", flags.ks, "comma-separated counts of zeroed timesteps (default 0,1,5,10)")
      ->delimiter(',');
  app->add_option("--mode", flags.mode, "top_positive or top_negative (default top_positive)");
  app->add_flag("--zero-weights", flags.zero_weights,
                "zero the class's classifier weights at the chosen steps instead of the inputs");
  app->add_option("--rank-block", flags.rank_block,
                  "(layer, direction) block used for ranking, layer-major (default 0)");
  if (is_export) {
    app->add_option("--out", flags.out, "output directory (default <checkpoint dir>/export)");
    app->add_flag("--no-counterfactuals", flags.skip,
                  "write weight maps and similarity only; no dataset needed");
  } else {
    app->add_option("--out", flags.out, "write the table as JSON to this file");
  }
}

struct CounterfactualTables {
  std::vector<CounterfactualResult> rows;
  std::vector<ClassTargetedResult> targeted;
};

std::string per_class_text(const std::vector<double>& acc) {
  std::string out = "[";
  for (std::size_t i = 0; i < acc.size(); ++i) out += (i ? " " : "") + fixed(acc[i]);
  return out + "]";
}

CounterfactualTables run_counterfactuals(const Model& model, const DataSet& data,
                                         const std::vector<std::size_t>& classes,
                                         const CounterfactualFlags& flags, bool targeted,
                                         bool defaults_k) {
  CounterfactualMode mode;
  try {
    mode = parse_counterfactual_mode(flags.mode);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--mode: ") + e.what());
  }
  std::vector<std::size_t> ks;
  for (std::size_t k : flags.ks) {
    if (k <= model.encoder.horizon) {
      ks.push_back(k);
    } else if (!defaults_k) {
      throw UsageError("k = " + std::to_string(k) + " exceeds the model horizon " +
                       std::to_string(model.encoder.horizon));
    }
  }
  TimeAnalysisOptions opts;
  opts.ablation = flags.zero_weights ? Ablation::kZeroWeights : Ablation::kZeroInputs;
  opts.rank_block = flags.rank_block;

  CounterfactualTables out;
  for (std::size_t c : classes) {
    for (std::size_t k : ks) {
      out.rows.push_back(time_analysis(model, data, c, k, mode, opts));
      const auto& r = out.rows.back();
      std::cout << "class=" << c << " k=" << k << " overall=" << fixed(r.report.overall_accuracy)
                << " per_class=" << per_class_text(r.report.per_class_accuracy)
                << " steps=[" << join(r.zeroed_steps) << "]\n";
    }
  }
  if (targeted) {
    for (std::size_t k : ks) {
      out.targeted.push_back(class_targeted_analysis(model, data, k, mode, opts));
      const auto& r = out.targeted.back();
      std::cout << "targeted k=" << k << " overall=" << fixed(r.overall_accuracy)
                << " per_class=" << per_class_text(r.per_class_accuracy) << "\n";
    }
  }
  return out;
}

int cmd_counterfactual(const CounterfactualFlags& flags, bool defaults_k) {
  const Checkpoint ck = load_checkpoint(flags.eval.checkpoint);
  require_nv(ck.model, "counterfactual");
  check_rank_block(ck.model, flags.rank_block);
  const bool all = lower(flags.classes) == "all";
  const auto classes = all ? std::vector<std::size_t>{} : parse_classes(flags.classes, ck.model.num_classes());
  const DataSet data = load_eval_data(ck, flags.eval);
  const CounterfactualTables t = run_counterfactuals(ck.model, data, classes, flags, all, defaults_k);
  if (!flags.out.empty()) write_file(flags.out, counterfactuals_to_json(t.rows, t.targeted));
  return 0;
}

int cmd_export(const CounterfactualFlags& flags, bool defaults_k) {
  const Checkpoint ck = load_checkpoint(flags.eval.checkpoint);
  const Model& model = ck.model;
  require_nv(model, "export");
  check_rank_block(model, flags.rank_block);
  const auto classes = parse_classes(flags.classes, model.num_classes());
  std::vector<WeightMap> maps;
  for (std::size_t c : classes) maps.push_back(weight_map(model.head, model.encoder, c));
  CounterfactualTables t;
  if (!flags.skip) {
    const DataSet data = load_eval_data(ck, flags.eval);
    t = run_counterfactuals(model, data, classes, flags, true, defaults_k);
  }
  const fs::path dir = flags.out.empty()
                           ? fs::path(flags.eval.checkpoint).parent_path() / "export"
                           : fs::path(flags.out);
  const ReportFiles files =
      export_report(maps, model.encoder, try_similarity(model.head), t.rows, dir, t.targeted);
  std::cout << "wrote " << files.weight_maps.size() << " weight maps"
            << (files.similarity ? ", similarity.csv" : "")
            << (files.counterfactuals ? ", counterfactuals.json" : "") << " and manifest.json to "
            << dir.string() << "\n";
  return 0;
}

struct SynthFlags {
  std::string out = ".";
  std::string name = "Synth";
  std::size_t classes = 2;
  std::size_t horizon = 24;
  std::size_t features = 1;
  std::size_t train_per_class = 20;
  std::size_t test_per_class = 50;
  std::uint64_t seed = 0;
  SynthOptions options;
};

int cmd_synth(const SynthFlags& f) {
  DataSet train, test;
  try {
    train = synth_separable(f.classes, f.horizon, f.features, f.train_per_class, f.seed, f.options);
    test = synth_separable(f.classes, f.horizon, f.features, f.test_per_class, f.seed + 1, f.options);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  fs::create_directories(f.out);
  const fs::path train_path = fs::path(f.out) / (f.name + "_TRAIN.tsv");
  const fs::path test_path = fs::path(f.out) / (f.name + "_TEST.tsv");
  save_ucr(train, train_path);
  save_ucr(test, test_path);
  std::cout << "wrote " << train_path.string() << " (" << train.size() << " rows) and "
            << test_path.string() << " (" << test.size() << " rows)\n";
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Recurrent sequence classifiers with an interpretable NeuroView head.", "nv"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "nv 0.1.0");
  app.footer("Exit codes: 0 success, 1 runtime failure, 2 usage or config error.\n"
             "NV_SEED overrides the configured seed; NV_UCR_DIR sets the data directory.");

  ConfigFlags train_flags;
  std::string train_data_dir;
  auto* train = app.add_subcommand("train", "train a model and write checkpoint.json, history.csv and config.txt");
  add_run_options(train, train_flags, train_data_dir);

  ConfigFlags sweep_flags;
  std::string sweep_data_dir;
  std::vector<std::size_t> sizes;
  auto* sweep = app.add_subcommand("sweep", "train one model per hidden size and keep the best by test accuracy");
  add_run_options(sweep, sweep_flags, sweep_data_dir);
  sweep->add_option("--sizes", sizes, "comma-separated hidden sizes, e.g. 32,64,128")
      ->required()
      ->delimiter(',');

  EvalFlags eval_flags;
  std::string eval_json;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "report accuracy and the confusion matrix of a checkpoint");
  add_eval_options(evaluate_cmd, eval_flags);
  evaluate_cmd->add_option("--json", eval_json, "also write the report as JSON to this file");

  InspectFlags inspect_flags;
  auto* inspect = app.add_subcommand("inspect", "export per-class weight maps and class similarity; print top-5 timesteps");
  inspect->add_option("--checkpoint", inspect_flags.checkpoint, "NeuroView checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  inspect->add_option("--classes", inspect_flags.classes, "comma-separated class indices or 'all' (default all)");
  inspect->add_option("--out", inspect_flags.out, "output directory (default <checkpoint dir>/inspect)");
  inspect->add_option("--rank-block", inspect_flags.rank_block,
                      "(layer, direction) block used for ranking, layer-major (default 0)");

  CounterfactualFlags cf_flags;
  auto* counterfactual = app.add_subcommand("counterfactual", "zero the top-k timesteps of a class and re-evaluate");
  add_counterfactual_options(counterfactual, cf_flags, false);

  CounterfactualFlags export_flags;
  auto* export_cmd = app.add_subcommand("export", "write weight maps, similarity and counterfactual tables to a directory");
  add_counterfactual_options(export_cmd, export_flags, true);

  SynthFlags synth_flags;
  auto* synth = app.add_subcommand("synth", "write a synthetic dataset whose classes differ only in early timesteps");
  synth->add_option("--out", synth_flags.out, "output directory (default .)");
  synth->add_option("--name", synth_flags.name, "file prefix (default Synth)");
  synth->add_option("--classes", synth_flags.classes, "number of classes (default 2)");
  synth->add_option("--horizon", synth_flags.horizon, "sequence length (default 24)");
  synth->add_option("--features", synth_flags.features, "features per step (default 1)");
  synth->add_option("--train-per-class", synth_flags.train_per_class, "train samples per class (default 20)");
  synth->add_option("--test-per-class", synth_flags.test_per_class, "test samples per class (default 50)");
  synth->add_option("--amplitude", synth_flags.options.amplitude, "offset inside the class window (default 2)");
  synth->add_option("--noise", synth_flags.options.noise_std, "noise std inside the signal region (default 0.1)");
  synth->add_option("--tail-noise", synth_flags.options.tail_noise_std, "noise std after the class windows (default 0.1)");
  synth->add_option("--window", synth_flags.options.window, "steps per class window; 0 = T / (2 * classes)");
  synth->add_option("--seed", synth_flags.seed, "seed; the test split uses seed + 1 (default 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*train) return cmd_train(train_flags, train_data_dir);
    if (*sweep) return cmd_sweep(sweep_flags, sweep_data_dir, sizes);
    if (*evaluate_cmd) return cmd_evaluate(eval_flags, eval_json);
    if (*inspect) return cmd_inspect(inspect_flags);
    if (*counterfactual) return cmd_counterfactual(cf_flags, counterfactual->count("--k") == 0);
    if (*export_cmd) return cmd_export(export_flags, export_cmd->count("--k") == 0);
    if (*synth) return cmd_synth(synth_flags);
  } catch (const UsageError& e) {
    std::cerr << "nv: error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "nv: config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "nv: error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TrainingDiverged& e) {
    std::cerr << "nv: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "nv: error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace nv

int main(int argc, char** argv) { return nv::run_cli(argc, argv); }
