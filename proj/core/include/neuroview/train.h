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

#ifndef NEUROVIEW_TRAIN_H_
#define NEUROVIEW_TRAIN_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "neuroview/cells.h"
#include "neuroview/data.h"
#include "neuroview/linalg.h"
#include "neuroview/network.h"

namespace nv {

// softmax(logits) via the max-shifted exponentials.
Vector softmax(std::span<const double> logits);

struct LossAndGrad {
  double loss = 0.0;
  Vector grad;  // dloss/dlogits = softmax - onehot(label)
};

// Cross-entropy of softmax(logits) against `label`. Throws
// std::out_of_range when label >= logits.size().
LossAndGrad softmax_xent(std::span<const double> logits, std::size_t label);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

// First and second moments per parameter block, plus the step count.
struct AdamState {
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::uint64_t step = 0;

  // Zero moments shaped like `params`.
  static AdamState for_params(std::span<const ConstParamView> params);

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

// One bias-corrected Adam update, in place. params and grads must list the
// same blocks in the same order as the state was built from.
void adam_step(std::span<const ParamView> params,
               std::span<const ConstParamView> grads, AdamState& state,
               const AdamConfig& config);

struct TrainConfig {
  AdamConfig adam;
  std::size_t epochs = 1000;
  std::size_t batch_size = 0;  // 0 means full batch
  std::uint64_t seed = 0;
  double clip_norm = 0.0;      // global gradient-norm clip; 0 disables

  // Throws std::invalid_argument naming the bad field.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
};

struct TrainResult {
  Model model;
  AdamState optimizer;
  std::vector<EpochStats> history;
};

// Raised when the mean loss of an epoch is not finite.
class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(std::size_t epoch, double loss);
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

// Initialises a model from spec with config.seed and trains it.
TrainResult fit(const DataSet& data, const TrainConfig& config, const ModelSpec& spec);

// Continues training an existing model. Minibatch order comes from a
// generator seeded with config.seed; per-sample gradients are summed in
// sample order, so a run is bit-reproducible.
TrainResult fit(const DataSet& data, const TrainConfig& config, Model model);

struct EvalReport {
  double overall_accuracy = 0.0;
  // Diagonal over row sum; 0 for a class with no samples.
  std::vector<double> per_class_accuracy;
  // confusion[true][predicted]
  std::vector<std::vector<std::size_t>> confusion;
  std::size_t total = 0;
};

EvalReport evaluate(const Model& model, const DataSet& data);

// Builds a report from (true, predicted) pairs.
EvalReport make_report(std::size_t num_classes, std::span<const std::size_t> truth,
                       std::span<const std::size_t> predicted);

// "epoch,mean_loss,train_acc" with one row per epoch.
void write_history_csv(const std::vector<EpochStats>& history,
                       const std::filesystem::path& path);

}  // namespace nv

#endif  // NEUROVIEW_TRAIN_H_
