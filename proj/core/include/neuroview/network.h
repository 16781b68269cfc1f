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

// Sequence encoders (stacked, optionally bidirectional) and the three
// classifier heads:
//
//   LastState    logits = V h(T)
//   AveragePool  logits = sum_t V h(t)          (divided by T if mean_pool)
//   NeuroView    q(t) = ReLU(h(t)), Q = [q(1); ...; q(T)], logits = V Q
//
// For NeuroView every layer and direction feeds the classifier. The per-step
// block of Q is laid out as
//
//   q(t) = [h(layer 0, fwd, t); h(layer 0, rev, t); h(layer 1, fwd, t); ...]
//
// so V has T blocks of width layers * directions * hidden_dim, one per
// timestep, and row i of V holds the weights of class i.

#ifndef NEUROVIEW_NETWORK_H_
#define NEUROVIEW_NETWORK_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "neuroview/cells.h"
#include "neuroview/linalg.h"

namespace nv {

enum class HeadKind { kLastState, kAveragePool, kNeuroView };

std::string_view to_string(HeadKind kind);
// Accepts "last", "avg"/"average", "nv"/"neuroview".
HeadKind parse_head_kind(std::string_view name);

struct EncoderConfig {
  CellKind cell = CellKind::kGru;
  std::size_t input_dim = 1;
  std::size_t hidden_dim = 32;
  std::size_t layers = 1;
  bool bidirectional = false;
  std::size_t horizon = 1;  // fixed sequence length T

  std::size_t directions() const { return bidirectional ? 2 : 1; }
  // Width of one layer's output at one timestep (n or 2n).
  std::size_t layer_output_width() const { return hidden_dim * directions(); }
  std::size_t layer_input_dim(std::size_t layer) const {
    return layer == 0 ? input_dim : layer_output_width();
  }
  // Width of q(t) for the NeuroView head.
  std::size_t step_block_width() const { return layers * layer_output_width(); }
  // Number of (layer, direction) blocks per timestep.
  std::size_t blocks_per_step() const { return layers * directions(); }
  std::size_t cell_count() const { return layers * directions(); }
  std::size_t cell_index(std::size_t layer, std::size_t direction) const {
    return layer * directions() + direction;
  }
  // Columns of V for the given head.
  std::size_t head_width(HeadKind kind) const;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

struct HeadParams {
  HeadKind kind = HeadKind::kNeuroView;
  Matrix weights;          // V, num_classes x head_width
  bool mean_pool = false;  // AveragePool only: divide the sum by T

  std::size_t num_classes() const { return weights.rows(); }

  friend bool operator==(const HeadParams&, const HeadParams&) = default;
};

// A full classifier: encoder cells in cell_index order plus the head.
struct Model {
  EncoderConfig encoder;
  std::vector<CellParams> cells;
  HeadParams head;

  const CellParams& cell(std::size_t layer, std::size_t direction) const {
    return cells[encoder.cell_index(layer, direction)];
  }

  std::size_t num_classes() const { return head.num_classes(); }

  // Every parameter block, cells first then the head ("V"). The optimizer
  // and the gradient structure rely on this order.
  std::vector<ParamView> views();
  std::vector<ConstParamView> views() const;
  std::size_t parameter_count() const;

  // Checks cells and head against the encoder config.
  void validate() const;

  friend bool operator==(const Model&, const Model&) = default;
};

struct ModelSpec {
  EncoderConfig encoder;
  HeadKind head = HeadKind::kNeuroView;
  bool mean_pool = false;
  std::size_t num_classes = 2;
  InitKind init = InitKind::kUniform;
};

// Cells are drawn first (layer-major, forward before reverse) from one
// generator seeded with `seed`, then the head from U(-1/sqrt(w), 1/sqrt(w))
// with w the head width.
Model init_model(const ModelSpec& spec, std::uint64_t seed);

struct ForwardTrace {
  // steps[cell_index][t]; reverse-direction cells are indexed by the input
  // timestep t they consumed, not by processing order.
  std::vector<std::vector<GateTrace>> steps;
  // inputs[layer][t]: what each layer consumed at t.
  std::vector<std::vector<Vector>> inputs;
  Vector q;                          // NeuroView: concatenated ReLU(h)
  Vector logits;
  std::vector<Vector> contributions;  // NeuroView: f(t) per timestep

  // Output of one cell at t.
  const Vector& hidden(std::size_t cell, std::size_t t) const {
    return steps[cell][t].h;
  }
};

// Runs every cell over x (horizon x input_dim). The head fields of the
// returned trace are left empty.
ForwardTrace encode(const EncoderConfig& cfg, std::span<const CellParams> cells,
                    const Matrix& x);

// Fills trace.logits (and q/contributions for NeuroView).
void head_forward(const HeadParams& head, const EncoderConfig& cfg,
                  ForwardTrace& trace);

// encode + head_forward.
ForwardTrace forward(const Model& model, const Matrix& x);

struct Gradients {
  std::vector<CellParams> cells;
  Matrix head;

  static Gradients zeros_like(const Model& model);
  void set_zero();
  // Same order as Model::views().
  std::vector<ParamView> views();
  std::vector<ConstParamView> views() const;
};

// Adds dL/dparams into grads given dL/dlogits.
void network_backward(const Model& model, const ForwardTrace& trace,
                      std::span<const double> grad_logits, Gradients& grads);

struct Prediction {
  std::size_t label = 0;
  Vector logits;
};

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

Prediction predict(const Model& model, const Matrix& x);

}  // namespace nv

#endif  // NEUROVIEW_NETWORK_H_
