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

#include "neuroview/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "neuroview/random.h"
#include "neuroview/text_io.h"

namespace nv {
namespace {

// Shuffling uses its own stream so that changing the batch size does not
// change the initial weights.
constexpr std::uint64_t kShuffleStream = 0x9e3779b97f4a7c15ULL;

void check_data(const DataSet& data, const Model& model) {
  if (data.empty()) throw std::invalid_argument("fit: dataset is empty");
  const EncoderConfig& enc = model.encoder;
  if (data.horizon != enc.horizon) {
    throw std::invalid_argument("fit: dataset horizon " + std::to_string(data.horizon) +
                                " does not match model horizon " +
                                std::to_string(enc.horizon));
  }
  if (data.feature_dim != enc.input_dim) {
    throw std::invalid_argument("fit: dataset has " + std::to_string(data.feature_dim) +
                                " features per step, model expects " +
                                std::to_string(enc.input_dim));
  }
  if (data.num_classes > model.num_classes()) {
    throw std::invalid_argument("fit: dataset has " + std::to_string(data.num_classes) +
                                " classes, model head has " +
                                std::to_string(model.num_classes()));
  }
}

void clip_gradients(Gradients& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& v : std::as_const(grads).views()) sq += dot(v.values, v.values);
  const double norm = std::sqrt(sq);
  if (norm <= max_norm || norm == 0.0) return;
  const double scale = max_norm / norm;
  for (auto& v : grads.views()) {
    for (double& g : v.values) g *= scale;
  }
}

}  // namespace

Vector softmax(std::span<const double> logits) {
  Vector out(logits.size());
  if (logits.empty()) return out;
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

LossAndGrad softmax_xent(std::span<const double> logits, std::size_t label) {
  if (label >= logits.size()) {
    throw std::out_of_range("softmax_xent: label " + std::to_string(label) +
                            " out of range for " + std::to_string(logits.size()) +
                            " classes");
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - mx);
  const double log_sum = mx + std::log(sum);
  LossAndGrad out;
  out.loss = log_sum - logits[label];
  out.grad = Vector(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out.grad[i] = std::exp(logits[i] - log_sum);
  }
  out.grad[label] -= 1.0;
  return out;
}

AdamState AdamState::for_params(std::span<const ConstParamView> params) {
  AdamState s;
  for (const auto& p : params) {
    s.first_moment.emplace_back(p.values.size(), 0.0);
    s.second_moment.emplace_back(p.values.size(), 0.0);
  }
  return s;
}

void adam_step(std::span<const ParamView> params,
               std::span<const ConstParamView> grads, AdamState& state,
               const AdamConfig& config) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size() ||
      params.size() != state.second_moment.size()) {
    throw std::invalid_argument("adam_step: " + std::to_string(params.size()) +
                                " parameter blocks, " + std::to_string(grads.size()) +
                                " gradient blocks, " +
                                std::to_string(state.first_moment.size()) + " state blocks");
  }
  for (std::size_t b = 0; b < params.size(); ++b) {
    const std::size_t len = params[b].values.size();
    if (grads[b].values.size() != len || state.first_moment[b].size() != len ||
        state.second_moment[b].size() != len) {
      throw std::invalid_argument("adam_step: block " + params[b].name +
                                  " has mismatched sizes");
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto theta = params[b].values;
    auto g = grads[b].values;
    auto& m = state.first_moment[b];
    auto& v = state.second_moment[b];
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      theta[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

void TrainConfig::validate() const {
  if (!(adam.learning_rate > 0.0) || !std::isfinite(adam.learning_rate)) {
    throw std::invalid_argument("learning_rate must be a finite value > 0");
  }
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0)) throw std::invalid_argument("beta1 must be in [0, 1)");
  if (!(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) throw std::invalid_argument("beta2 must be in [0, 1)");
  if (!(adam.epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(clip_norm >= 0.0)) throw std::invalid_argument("clip_norm must be >= 0");
}

TrainingDiverged::TrainingDiverged(std::size_t epoch, double loss)
    : std::runtime_error("training diverged at epoch " + std::to_string(epoch) +
                         ": mean loss is " + format_double(loss)),
      epoch_(epoch) {}

TrainResult fit(const DataSet& data, const TrainConfig& config, const ModelSpec& spec) {
  return fit(data, config, init_model(spec, config.seed));
}

TrainResult fit(const DataSet& data, const TrainConfig& config, Model model) {
  config.validate();
  model.validate();
  check_data(data, model);

  TrainResult result;
  result.optimizer = AdamState::for_params(std::as_const(model).views());
  Gradients grads = Gradients::zeros_like(model);
  const auto param_views = model.views();
  const auto grad_views = std::as_const(grads).views();

  const std::size_t count = data.size();
  const std::size_t batch = config.batch_size == 0 ? count : std::min(config.batch_size, count);
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(config.seed ^ kShuffleStream);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < count; start += batch) {
      const std::size_t end = std::min(count, start + batch);
      const double scale = 1.0 / static_cast<double>(end - start);
      grads.set_zero();
      for (std::size_t k = start; k < end; ++k) {
        const SequenceSample& s = data.samples[order[k]];
        ForwardTrace trace = forward(model, s.features);
        LossAndGrad lg = softmax_xent(trace.logits.span(), s.label);
        loss_sum += lg.loss;
        if (argmax(trace.logits.span()) == s.label) ++correct;
        for (double& g : lg.grad) g *= scale;
        network_backward(model, trace, lg.grad.span(), grads);
      }
      if (config.clip_norm > 0.0) clip_gradients(grads, config.clip_norm);
      adam_step(param_views, grad_views, result.optimizer, config.adam);
    }
    const double mean_loss = loss_sum / static_cast<double>(count);
    if (!std::isfinite(mean_loss)) throw TrainingDiverged(epoch, mean_loss);
    result.history.push_back(
        {epoch, mean_loss, static_cast<double>(correct) / static_cast<double>(count)});
  }
  result.model = std::move(model);
  return result;
}

EvalReport make_report(std::size_t num_classes, std::span<const std::size_t> truth,
                       std::span<const std::size_t> predicted) {
  if (truth.size() != predicted.size()) {
    throw std::invalid_argument("make_report: truth and prediction counts differ");
  }
  EvalReport r;
  r.total = truth.size();
  r.confusion.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++r.confusion.at(truth[i]).at(predicted[i]);
    if (truth[i] == predicted[i]) ++correct;
  }
  r.overall_accuracy =
      r.total ? static_cast<double>(correct) / static_cast<double>(r.total) : 0.0;
  r.per_class_accuracy.assign(num_classes, 0.0);
  for (std::size_t c = 0; c < num_classes; ++c) {
    const std::size_t row = std::accumulate(r.confusion[c].begin(), r.confusion[c].end(),
                                            std::size_t{0});
    if (row) r.per_class_accuracy[c] = static_cast<double>(r.confusion[c][c]) / static_cast<double>(row);
  }
  return r;
}

EvalReport evaluate(const Model& model, const DataSet& data) {
  std::vector<std::size_t> truth;
  std::vector<std::size_t> predicted;
  truth.reserve(data.size());
  predicted.reserve(data.size());
  for (const auto& s : data.samples) {
    truth.push_back(s.label);
    predicted.push_back(predict(model, s.features).label);
  }
  return make_report(std::max(model.num_classes(), data.num_classes), truth, predicted);
}

void write_history_csv(const std::vector<EpochStats>& history,
                       const std::filesystem::path& path) {
  std::string out = "epoch,mean_loss,train_acc\n";
  for (const auto& e : history) {
    out += std::to_string(e.epoch) + "," + format_double(e.mean_loss) + "," +
           format_double(e.train_accuracy) + "\n";
  }
  write_file(path, out);
}

}  // namespace nv
