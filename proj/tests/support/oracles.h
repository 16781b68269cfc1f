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

// Independent reference computations shared by the unit and acceptance
// tests: central finite differences and random problem builders.

#ifndef NEUROVIEW_TESTS_SUPPORT_ORACLES_H_
#define NEUROVIEW_TESTS_SUPPORT_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "neuroview/cells.h"
#include "neuroview/linalg.h"
#include "neuroview/network.h"
#include "neuroview/random.h"
#include "neuroview/train.h"

namespace nv::testing {

inline constexpr double kFdStep = 1e-5;
inline constexpr double kFdTolerance = 1e-6;
// Central differences at h = 1e-5 carry about 1e-11 of round-off plus
// O(h^2) truncation error, so gradients smaller than this are compared on
// an absolute scale of kFdTolerance * kFdScaleFloor = 1e-10.
inline constexpr double kFdScaleFloor = 1e-4;

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), kFdScaleFloor});
}

struct GradCheck {
  double max_relative_error = 0.0;
  std::string worst;  // "block[index]: analytic vs numeric"
  std::size_t checked = 0;
};

// Compares `analytic` against central differences of `loss` with respect to
// every entry of `params`. The two lists must describe the same blocks.
inline GradCheck check_gradients(const std::vector<ParamView>& params,
                                 const std::vector<ConstParamView>& analytic,
                                 const std::function<double()>& loss,
                                 double step = kFdStep) {
  GradCheck out;
  for (std::size_t b = 0; b < params.size(); ++b) {
    for (std::size_t i = 0; i < params[b].values.size(); ++i) {
      double& theta = params[b].values[i];
      const double saved = theta;
      theta = saved + step;
      const double up = loss();
      theta = saved - step;
      const double down = loss();
      theta = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[b].values[i];
      const double err = relative_error(a, numeric);
      ++out.checked;
      if (out.worst.empty() || err > out.max_relative_error) {
        out.max_relative_error = err;
        char buf[160];
        std::snprintf(buf, sizeof buf, "[%zu]: analytic %.12e vs numeric %.12e", i, a, numeric);
        out.worst = params[b].name + buf;
      }
    }
  }
  return out;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.span()) v = rng.uniform(-scale, scale);
  return m;
}

inline Vector random_vector(std::size_t n, Rng& rng, double scale = 1.0) {
  Vector v(n);
  for (double& x : v) x = rng.uniform(-scale, scale);
  return v;
}

// Model with all parameters drawn from U(-scale, scale).
inline Model random_model(const EncoderConfig& enc, HeadKind head, std::size_t classes,
                          std::uint64_t seed, double scale = 0.8, bool mean_pool = false) {
  ModelSpec spec;
  spec.encoder = enc;
  spec.head = head;
  spec.mean_pool = mean_pool;
  spec.num_classes = classes;
  Model model = init_model(spec, seed);
  Rng rng(seed + 7919);
  for (auto& v : model.views()) {
    for (double& x : v.values) x = rng.uniform(-scale, scale);
  }
  return model;
}

// Cross-entropy of the model on one sample, the objective the trainer uses.
inline double sample_loss(const Model& model, const Matrix& x, std::size_t label) {
  const ForwardTrace trace = forward(model, x);
  return softmax_xent(trace.logits.span(), label).loss;
}

inline Gradients sample_gradients(const Model& model, const Matrix& x, std::size_t label) {
  const ForwardTrace trace = forward(model, x);
  const LossAndGrad lg = softmax_xent(trace.logits.span(), label);
  Gradients g = Gradients::zeros_like(model);
  network_backward(model, trace, lg.grad.span(), g);
  return g;
}

}  // namespace nv::testing

#endif  // NEUROVIEW_TESTS_SUPPORT_ORACLES_H_
