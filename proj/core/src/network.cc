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

#include "neuroview/network.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nv {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

CellState state_after(const GateTrace& tr) {
  CellState s;
  s.h = tr.h;
  if (tr.kind == CellKind::kLstm) s.c = tr.c;
  return s;
}

// Concatenated top-layer output at t: [h_fwd(t); h_rev(t)].
void top_output(const EncoderConfig& cfg, const ForwardTrace& trace,
                std::size_t t, std::span<double> out) {
  const std::size_t top = cfg.layers - 1;
  for (std::size_t dir = 0; dir < cfg.directions(); ++dir) {
    const Vector& h = trace.hidden(cfg.cell_index(top, dir), t);
    std::copy(h.begin(), h.end(), out.begin() + dir * cfg.hidden_dim);
  }
}

}  // namespace

std::string_view to_string(HeadKind kind) {
  switch (kind) {
    case HeadKind::kLastState:
      return "last";
    case HeadKind::kAveragePool:
      return "avg";
    case HeadKind::kNeuroView:
      return "nv";
  }
  return "?";
}

HeadKind parse_head_kind(std::string_view name) {
  const std::string s = lower(name);
  if (s == "last" || s == "laststate" || s == "last_state") return HeadKind::kLastState;
  if (s == "avg" || s == "average" || s == "averagepool" || s == "average_pool") {
    return HeadKind::kAveragePool;
  }
  if (s == "nv" || s == "neuroview") return HeadKind::kNeuroView;
  throw std::invalid_argument("unknown head kind '" + std::string(name) +
                              "' (expected last, avg or nv)");
}

std::size_t EncoderConfig::head_width(HeadKind kind) const {
  return kind == HeadKind::kNeuroView ? horizon * step_block_width()
                                      : layer_output_width();
}

void EncoderConfig::validate() const {
  if (input_dim < 1) throw std::invalid_argument("encoder: input_dim must be >= 1");
  if (hidden_dim < 1) throw std::invalid_argument("encoder: hidden_dim must be >= 1");
  if (layers < 1) throw std::invalid_argument("encoder: layers must be >= 1");
  if (horizon < 1) throw std::invalid_argument("encoder: horizon must be >= 1");
}

std::vector<ParamView> Model::views() {
  std::vector<ParamView> out;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (auto& v : cells[c].views()) {
      v.name = "cell" + std::to_string(c) + "." + v.name;
      out.push_back(std::move(v));
    }
  }
  out.push_back({"V", head.weights.rows(), head.weights.cols(), head.weights.span()});
  return out;
}

std::vector<ConstParamView> Model::views() const {
  std::vector<ConstParamView> out;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (auto& v : cells[c].views()) {
      v.name = "cell" + std::to_string(c) + "." + v.name;
      out.push_back(std::move(v));
    }
  }
  out.push_back({"V", head.weights.rows(), head.weights.cols(), head.weights.span()});
  return out;
}

std::size_t Model::parameter_count() const {
  std::size_t total = 0;
  for (const auto& v : views()) total += v.values.size();
  return total;
}

void Model::validate() const {
  encoder.validate();
  if (cells.size() != encoder.cell_count()) {
    throw std::invalid_argument("model: expected " +
                                std::to_string(encoder.cell_count()) +
                                " cells, got " + std::to_string(cells.size()));
  }
  for (std::size_t layer = 0; layer < encoder.layers; ++layer) {
    for (std::size_t dir = 0; dir < encoder.directions(); ++dir) {
      const CellParams& p = cell(layer, dir);
      const std::string where = "model: cell (layer " + std::to_string(layer) +
                                ", direction " + std::to_string(dir) + ")";
      if (p.kind != encoder.cell) throw std::invalid_argument(where + " has the wrong kind");
      if (p.input_dim != encoder.layer_input_dim(layer) ||
          p.hidden_dim != encoder.hidden_dim) {
        throw std::invalid_argument(where + " has the wrong dimensions");
      }
      p.validate();
    }
  }
  const std::size_t width = encoder.head_width(head.kind);
  if (head.weights.cols() != width) {
    throw std::invalid_argument("model: head V has " +
                                std::to_string(head.weights.cols()) +
                                " columns, encoder produces " + std::to_string(width));
  }
  if (head.weights.rows() < 1) throw std::invalid_argument("model: head has no classes");
}

Model init_model(const ModelSpec& spec, std::uint64_t seed) {
  spec.encoder.validate();
  if (spec.num_classes < 1) throw std::invalid_argument("init_model: num_classes must be >= 1");
  Rng rng(seed);
  Model model;
  model.encoder = spec.encoder;
  for (std::size_t layer = 0; layer < spec.encoder.layers; ++layer) {
    for (std::size_t dir = 0; dir < spec.encoder.directions(); ++dir) {
      model.cells.push_back(init_params(spec.encoder.cell,
                                        spec.encoder.layer_input_dim(layer),
                                        spec.encoder.hidden_dim, spec.init, rng));
    }
  }
  const std::size_t width = spec.encoder.head_width(spec.head);
  model.head.kind = spec.head;
  model.head.mean_pool = spec.mean_pool;
  model.head.weights = Matrix(spec.num_classes, width);
  const double bound = 1.0 / std::sqrt(static_cast<double>(width));
  for (double& v : model.head.weights.span()) v = rng.uniform(-bound, bound);
  return model;
}

ForwardTrace encode(const EncoderConfig& cfg, std::span<const CellParams> cells,
                    const Matrix& x) {
  cfg.validate();
  if (cells.size() != cfg.cell_count()) {
    throw std::invalid_argument("encode: config needs " +
                                std::to_string(cfg.cell_count()) +
                                " cells, got " + std::to_string(cells.size()));
  }
  if (x.rows() != cfg.horizon || x.cols() != cfg.input_dim) {
    throw std::invalid_argument("encode: input is " + x.shape_string() +
                                ", expected " + std::to_string(cfg.horizon) + "x" +
                                std::to_string(cfg.input_dim) +
                                " (pad or truncate to the horizon first)");
  }
  const std::size_t T = cfg.horizon;
  const std::size_t n = cfg.hidden_dim;
  ForwardTrace trace;
  trace.steps.resize(cfg.cell_count());
  trace.inputs.resize(cfg.layers);

  trace.inputs[0].reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    auto row = x.row(t);
    trace.inputs[0].emplace_back(std::vector<double>(row.begin(), row.end()));
  }

  for (std::size_t layer = 0; layer < cfg.layers; ++layer) {
    const auto& in = trace.inputs[layer];
    for (std::size_t dir = 0; dir < cfg.directions(); ++dir) {
      const std::size_t ci = cfg.cell_index(layer, dir);
      const CellParams& p = cells[ci];
      if (p.kind != cfg.cell || p.input_dim != cfg.layer_input_dim(layer) ||
          p.hidden_dim != n) {
        throw std::invalid_argument("encode: cell " + std::to_string(ci) +
                                    " does not match the encoder config");
      }
      auto& steps = trace.steps[ci];
      steps.resize(T);
      CellState state = CellState::zeros(cfg.cell, n);
      for (std::size_t k = 0; k < T; ++k) {
        const std::size_t t = dir == 0 ? k : T - 1 - k;
        CellStep step = cell_forward(p, state, in[t]);
        state = std::move(step.state);
        steps[t] = std::move(step.trace);
      }
    }
    if (layer + 1 < cfg.layers) {
      auto& next = trace.inputs[layer + 1];
      next.reserve(T);
      for (std::size_t t = 0; t < T; ++t) {
        Vector out(cfg.layer_output_width());
        for (std::size_t dir = 0; dir < cfg.directions(); ++dir) {
          const Vector& h = trace.hidden(cfg.cell_index(layer, dir), t);
          std::copy(h.begin(), h.end(), out.begin() + dir * n);
        }
        next.push_back(std::move(out));
      }
    }
  }
  return trace;
}

void head_forward(const HeadParams& head, const EncoderConfig& cfg,
                  ForwardTrace& trace) {
  const std::size_t width = cfg.head_width(head.kind);
  if (head.weights.cols() != width) {
    throw std::invalid_argument("head_forward: V has " +
                                std::to_string(head.weights.cols()) +
                                " columns but the encoder produces " +
                                std::to_string(width));
  }
  if (trace.steps.size() != cfg.cell_count()) {
    throw std::invalid_argument("head_forward: trace does not match the encoder config");
  }
  const std::size_t T = cfg.horizon;
  const std::size_t d = head.num_classes();
  const Matrix& V = head.weights;
  trace.logits = Vector(d);
  trace.q = Vector();
  trace.contributions.clear();

  switch (head.kind) {
    case HeadKind::kLastState: {
      Vector h(width);
      top_output(cfg, trace, T - 1, h.span());
      matvec_accumulate(V, h.span(), trace.logits.span());
      break;
    }
    case HeadKind::kAveragePool: {
      Vector sum(width);
      Vector h(width);
      for (std::size_t t = 0; t < T; ++t) {
        top_output(cfg, trace, t, h.span());
        for (std::size_t j = 0; j < width; ++j) sum[j] += h[j];
      }
      if (head.mean_pool) {
        for (double& v : sum) v /= static_cast<double>(T);
      }
      matvec_accumulate(V, sum.span(), trace.logits.span());
      break;
    }
    case HeadKind::kNeuroView: {
      const std::size_t block = cfg.step_block_width();
      const std::size_t n = cfg.hidden_dim;
      trace.q = Vector(width);
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t c = 0; c < cfg.cell_count(); ++c) {
          const Vector& h = trace.hidden(c, t);
          double* q = trace.q.data() + t * block + c * n;
          for (std::size_t j = 0; j < n; ++j) q[j] = relu(h[j]);
        }
      }
      trace.contributions.assign(T, Vector(d));
      for (std::size_t t = 0; t < T; ++t) {
        Vector& f = trace.contributions[t];
        for (std::size_t i = 0; i < d; ++i) {
          f[i] = dot(V.row(i).subspan(t * block, block),
                     trace.q.span().subspan(t * block, block));
        }
      }
      // Logits straight from V Q; the per-step split is a separate sum.
      matvec_accumulate(V, trace.q.span(), trace.logits.span());
      break;
    }
  }
}

ForwardTrace forward(const Model& model, const Matrix& x) {
  ForwardTrace trace = encode(model.encoder, model.cells, x);
  head_forward(model.head, model.encoder, trace);
  return trace;
}

Gradients Gradients::zeros_like(const Model& model) {
  Gradients g;
  g.cells.reserve(model.cells.size());
  for (const auto& c : model.cells) g.cells.push_back(c.zeros_like());
  g.head = Matrix(model.head.weights.rows(), model.head.weights.cols());
  return g;
}

void Gradients::set_zero() {
  for (auto& v : views()) std::fill(v.values.begin(), v.values.end(), 0.0);
}

std::vector<ParamView> Gradients::views() {
  std::vector<ParamView> out;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (auto& v : cells[c].views()) {
      v.name = "cell" + std::to_string(c) + "." + v.name;
      out.push_back(std::move(v));
    }
  }
  out.push_back({"V", head.rows(), head.cols(), head.span()});
  return out;
}

std::vector<ConstParamView> Gradients::views() const {
  std::vector<ConstParamView> out;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (auto& v : cells[c].views()) {
      v.name = "cell" + std::to_string(c) + "." + v.name;
      out.push_back(std::move(v));
    }
  }
  out.push_back({"V", head.rows(), head.cols(), head.span()});
  return out;
}

void network_backward(const Model& model, const ForwardTrace& trace,
                      std::span<const double> grad_logits, Gradients& grads) {
  const EncoderConfig& cfg = model.encoder;
  const HeadParams& head = model.head;
  const std::size_t T = cfg.horizon;
  const std::size_t n = cfg.hidden_dim;
  const std::size_t d = head.num_classes();
  if (grad_logits.size() != d) {
    throw std::invalid_argument("network_backward: grad_logits has length " +
                                std::to_string(grad_logits.size()) + ", expected " +
                                std::to_string(d));
  }
  if (trace.steps.size() != cfg.cell_count() || trace.logits.size() != d) {
    throw std::invalid_argument("network_backward: trace does not match the model");
  }
  if (grads.cells.size() != model.cells.size() ||
      grads.head.rows() != head.weights.rows() ||
      grads.head.cols() != head.weights.cols()) {
    throw std::invalid_argument("network_backward: gradient buffers do not match the model");
  }

  // grad_hidden[cell][t] = dL/dh for that cell's output at t.
  std::vector<std::vector<Vector>> grad_hidden(cfg.cell_count(),
                                               std::vector<Vector>(T, Vector(n)));
  const std::size_t top = cfg.layers - 1;
  const std::size_t width = cfg.head_width(head.kind);
  Vector dfeat(width);
  matvec_transposed_accumulate(head.weights, grad_logits, dfeat.span());

  switch (head.kind) {
    case HeadKind::kLastState: {
      Vector h(width);
      top_output(cfg, trace, T - 1, h.span());
      add_outer(grads.head, grad_logits, h.span());
      for (std::size_t dir = 0; dir < cfg.directions(); ++dir) {
        Vector& g = grad_hidden[cfg.cell_index(top, dir)][T - 1];
        for (std::size_t j = 0; j < n; ++j) g[j] += dfeat[dir * n + j];
      }
      break;
    }
    case HeadKind::kAveragePool: {
      const double scale = head.mean_pool ? 1.0 / static_cast<double>(T) : 1.0;
      Vector sum(width);
      Vector h(width);
      for (std::size_t t = 0; t < T; ++t) {
        top_output(cfg, trace, t, h.span());
        for (std::size_t j = 0; j < width; ++j) sum[j] += h[j];
      }
      for (double& v : sum) v *= scale;
      add_outer(grads.head, grad_logits, sum.span());
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t dir = 0; dir < cfg.directions(); ++dir) {
          Vector& g = grad_hidden[cfg.cell_index(top, dir)][t];
          for (std::size_t j = 0; j < n; ++j) g[j] += scale * dfeat[dir * n + j];
        }
      }
      break;
    }
    case HeadKind::kNeuroView: {
      add_outer(grads.head, grad_logits, trace.q.span());
      const std::size_t block = cfg.step_block_width();
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t c = 0; c < cfg.cell_count(); ++c) {
          const Vector& h = trace.hidden(c, t);
          Vector& g = grad_hidden[c][t];
          const double* df = dfeat.data() + t * block + c * n;
          // ReLU passes gradient only where h > 0.
          for (std::size_t j = 0; j < n; ++j) {
            if (h[j] > 0.0) g[j] += df[j];
          }
        }
      }
      break;
    }
  }

  for (std::size_t layer = cfg.layers; layer-- > 0;) {
    const auto& inputs = trace.inputs[layer];
    for (std::size_t dir = 0; dir < cfg.directions(); ++dir) {
      const std::size_t ci = cfg.cell_index(layer, dir);
      const CellParams& p = model.cells[ci];
      const auto& steps = trace.steps[ci];
      auto& gh = grad_hidden[ci];
      const CellState zero = CellState::zeros(cfg.cell, n);
      Vector carry_c;  // LSTM cell-state gradient from the later step
      // Walk the processing order backwards.
      for (std::size_t k = T; k-- > 0;) {
        const std::size_t t = dir == 0 ? k : T - 1 - k;
        const bool first = k == 0;
        const std::size_t t_prev = dir == 0 ? t - 1 : t + 1;
        const CellState prev = first ? zero : state_after(steps[t_prev]);
        CellInputGrads g = cell_backward(p, steps[t], prev, inputs[t].span(),
                                         gh[t].span(), carry_c.span(), grads.cells[ci]);
        if (!first) {
          Vector& into = gh[t_prev];
          for (std::size_t j = 0; j < n; ++j) into[j] += g.prev_h[j];
        }
        carry_c = std::move(g.prev_c);
        if (layer > 0) {
          // Split dL/dx back onto the lower layer's per-direction outputs.
          for (std::size_t below_dir = 0; below_dir < cfg.directions(); ++below_dir) {
            Vector& into = grad_hidden[cfg.cell_index(layer - 1, below_dir)][t];
            for (std::size_t j = 0; j < n; ++j) into[j] += g.x[below_dir * n + j];
          }
        }
      }
    }
  }
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

Prediction predict(const Model& model, const Matrix& x) {
  ForwardTrace trace = forward(model, x);
  Prediction p;
  p.label = argmax(trace.logits.span());
  p.logits = std::move(trace.logits);
  return p;
}

}  // namespace nv
