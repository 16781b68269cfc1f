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

#include "neuroview/cells.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace nv {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

constexpr std::array<char, 3> kGruGateNames = {'r', 'z', 'n'};
constexpr std::array<char, 4> kLstmGateNames = {'i', 'f', 'g', 'o'};

std::string block_name(CellKind kind, char prefix, char side, std::size_t gate) {
  if (kind == CellKind::kSimpleRnn) {
    if (prefix == 'b') return "b";
    return side == 'i' ? "U" : "W";
  }
  const char g = kind == CellKind::kGru ? kGruGateNames[gate] : kLstmGateNames[gate];
  return std::string{prefix, '_', side, g};
}

template <typename View, typename Params>
std::vector<View> make_views(Params& p) {
  std::vector<View> out;
  const std::size_t gates = p.input_weights.size();
  for (std::size_t g = 0; g < gates; ++g) {
    auto& m = p.input_weights[g];
    out.push_back({block_name(p.kind, 'W', 'i', g), m.rows(), m.cols(), m.span()});
  }
  for (std::size_t g = 0; g < gates; ++g) {
    auto& m = p.hidden_weights[g];
    out.push_back({block_name(p.kind, 'W', 'h', g), m.rows(), m.cols(), m.span()});
  }
  for (std::size_t g = 0; g < p.input_biases.size(); ++g) {
    auto& b = p.input_biases[g];
    out.push_back({block_name(p.kind, 'b', 'i', g), b.size(), 1, b.span()});
  }
  for (std::size_t g = 0; g < p.hidden_biases.size(); ++g) {
    auto& b = p.hidden_biases[g];
    out.push_back({block_name(p.kind, 'b', 'h', g), b.size(), 1, b.span()});
  }
  return out;
}

void require_len(std::span<const double> v, std::size_t n, const char* what) {
  if (v.size() != n) {
    throw std::invalid_argument(std::string(what) + " has length " +
                                std::to_string(v.size()) + ", expected " +
                                std::to_string(n));
  }
}

// pre = W_i x + b_i (+ W_h h + b_h) for gate g.
void gate_preactivation(const CellParams& p, std::size_t g,
                        std::span<const double> x, std::span<const double> h,
                        std::span<double> out) {
  std::copy(p.input_biases[g].begin(), p.input_biases[g].end(), out.begin());
  if (!p.hidden_biases.empty()) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += p.hidden_biases[g][j];
  }
  matvec_accumulate(p.input_weights[g], x, out);
  matvec_accumulate(p.hidden_weights[g], h, out);
}

void apply_sigmoid(Vector& v) {
  for (double& x : v) x = sigmoid(x);
}

void apply_tanh(Vector& v) {
  for (double& x : v) x = std::tanh(x);
}

// Accumulates the parameter gradient of one gate given dL/d(pre-activation),
// and propagates into grad_x / grad_h_prev.
void gate_backward(const CellParams& p, std::size_t g, std::span<const double> x,
                   std::span<const double> h_prev, std::span<const double> d_pre,
                   CellParams& acc, CellInputGrads& out) {
  add_outer(acc.input_weights[g], d_pre, x);
  add_outer(acc.hidden_weights[g], d_pre, h_prev);
  for (std::size_t j = 0; j < d_pre.size(); ++j) acc.input_biases[g][j] += d_pre[j];
  if (!acc.hidden_biases.empty()) {
    for (std::size_t j = 0; j < d_pre.size(); ++j) acc.hidden_biases[g][j] += d_pre[j];
  }
  matvec_transposed_accumulate(p.input_weights[g], d_pre, out.x.span());
  matvec_transposed_accumulate(p.hidden_weights[g], d_pre, out.prev_h.span());
}

double uniform_bound(std::size_t hidden_dim) {
  return 1.0 / std::sqrt(static_cast<double>(hidden_dim));
}

void fill_uniform(std::span<double> values, double bound, Rng& rng) {
  for (double& v : values) v = rng.uniform(-bound, bound);
}

}  // namespace

std::string_view to_string(CellKind kind) {
  switch (kind) {
    case CellKind::kSimpleRnn:
      return "rnn";
    case CellKind::kGru:
      return "gru";
    case CellKind::kLstm:
      return "lstm";
  }
  return "?";
}

CellKind parse_cell_kind(std::string_view name) {
  const std::string s = lower(name);
  if (s == "rnn" || s == "simplernn" || s == "simple_rnn") return CellKind::kSimpleRnn;
  if (s == "gru") return CellKind::kGru;
  if (s == "lstm") return CellKind::kLstm;
  throw std::invalid_argument("unknown cell kind '" + std::string(name) +
                              "' (expected rnn, gru or lstm)");
}

std::size_t gate_count(CellKind kind) {
  switch (kind) {
    case CellKind::kSimpleRnn:
      return 1;
    case CellKind::kGru:
      return 3;
    case CellKind::kLstm:
      return 4;
  }
  return 0;
}

CellParams CellParams::zeros(CellKind kind, std::size_t input_dim,
                             std::size_t hidden_dim) {
  CellParams p;
  p.kind = kind;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  const std::size_t gates = gate_count(kind);
  p.input_weights.assign(gates, Matrix(hidden_dim, input_dim));
  p.hidden_weights.assign(gates, Matrix(hidden_dim, hidden_dim));
  p.input_biases.assign(gates, Vector(hidden_dim));
  if (kind != CellKind::kSimpleRnn) p.hidden_biases.assign(gates, Vector(hidden_dim));
  return p;
}

std::vector<ParamView> CellParams::views() { return make_views<ParamView>(*this); }

std::vector<ConstParamView> CellParams::views() const {
  return make_views<ConstParamView>(*this);
}

std::size_t CellParams::parameter_count() const {
  std::size_t total = 0;
  for (const auto& v : views()) total += v.values.size();
  return total;
}

void CellParams::validate() const {
  const std::size_t gates = gate_count(kind);
  const std::size_t hidden_bias_gates = kind == CellKind::kSimpleRnn ? 0 : gates;
  if (input_weights.size() != gates || hidden_weights.size() != gates ||
      input_biases.size() != gates || hidden_biases.size() != hidden_bias_gates) {
    throw std::invalid_argument("CellParams: wrong number of blocks for " +
                                std::string(to_string(kind)) + " cell");
  }
  for (const auto& v : views()) {
    const bool is_bias = v.name[0] == 'b';
    const bool is_hidden = !is_bias && (v.name == "W" || v.name[2] == 'h');
    const std::size_t want_cols = is_bias ? 1 : (is_hidden ? hidden_dim : input_dim);
    if (v.rows != hidden_dim || v.cols != want_cols) {
      throw std::invalid_argument(
          "CellParams: block " + v.name + " is " + std::to_string(v.rows) + "x" +
          std::to_string(v.cols) + ", expected " + std::to_string(hidden_dim) +
          "x" + std::to_string(want_cols));
    }
  }
}

CellState CellState::zeros(CellKind kind, std::size_t hidden_dim) {
  CellState s;
  s.h = Vector(hidden_dim);
  if (kind == CellKind::kLstm) s.c = Vector(hidden_dim);
  return s;
}

CellStep cell_forward(const CellParams& p, const CellState& state,
                      std::span<const double> x) {
  const std::size_t n = p.hidden_dim;
  require_len(x, p.input_dim, "cell_forward: input x");
  require_len(state.h.span(), n, "cell_forward: state h");

  CellStep step;
  GateTrace& tr = step.trace;
  tr.kind = p.kind;
  const auto h_prev = state.h.span();

  switch (p.kind) {
    case CellKind::kSimpleRnn: {
      Vector pre(n);
      gate_preactivation(p, 0, x, h_prev, pre.span());
      apply_sigmoid(pre);
      tr.h = std::move(pre);
      break;
    }
    case CellKind::kGru: {
      tr.gates.assign(3, Vector(n));
      Vector& r = tr.gates[gru::kReset];
      Vector& z = tr.gates[gru::kUpdate];
      Vector& cand = tr.gates[gru::kNew];
      gate_preactivation(p, gru::kReset, x, h_prev, r.span());
      gate_preactivation(p, gru::kUpdate, x, h_prev, z.span());
      apply_sigmoid(r);
      apply_sigmoid(z);

      tr.hidden_proj = p.hidden_biases[gru::kNew];
      matvec_accumulate(p.hidden_weights[gru::kNew], h_prev, tr.hidden_proj.span());
      cand = p.input_biases[gru::kNew];
      matvec_accumulate(p.input_weights[gru::kNew], x, cand.span());
      for (std::size_t j = 0; j < n; ++j) cand[j] += r[j] * tr.hidden_proj[j];
      apply_tanh(cand);

      tr.h = Vector(n);
      for (std::size_t j = 0; j < n; ++j) {
        tr.h[j] = (1.0 - z[j]) * cand[j] + z[j] * h_prev[j];
      }
      break;
    }
    case CellKind::kLstm: {
      require_len(state.c.span(), n, "cell_forward: state c");
      tr.gates.assign(4, Vector(n));
      for (std::size_t g = 0; g < 4; ++g) {
        gate_preactivation(p, g, x, h_prev, tr.gates[g].span());
        if (g == lstm::kCell) {
          apply_tanh(tr.gates[g]);
        } else {
          apply_sigmoid(tr.gates[g]);
        }
      }
      const Vector& i = tr.gates[lstm::kInput];
      const Vector& f = tr.gates[lstm::kForget];
      const Vector& g = tr.gates[lstm::kCell];
      const Vector& o = tr.gates[lstm::kOutput];
      tr.c = Vector(n);
      tr.h = Vector(n);
      for (std::size_t j = 0; j < n; ++j) {
        tr.c[j] = f[j] * state.c[j] + i[j] * g[j];
        tr.h[j] = o[j] * std::tanh(tr.c[j]);
      }
      break;
    }
  }
  step.state.h = tr.h;
  if (p.kind == CellKind::kLstm) step.state.c = tr.c;
  return step;
}

CellInputGrads cell_backward(const CellParams& p, const GateTrace& tr,
                             const CellState& prev, std::span<const double> x,
                             std::span<const double> grad_h,
                             std::span<const double> grad_c, CellParams& acc) {
  if (tr.kind != p.kind) {
    throw std::invalid_argument("cell_backward: trace is from a " +
                                std::string(to_string(tr.kind)) +
                                " cell but params are " +
                                std::string(to_string(p.kind)));
  }
  if (acc.kind != p.kind || acc.hidden_dim != p.hidden_dim ||
      acc.input_dim != p.input_dim) {
    throw std::invalid_argument("cell_backward: gradient accumulator shape mismatch");
  }
  const std::size_t n = p.hidden_dim;
  require_len(grad_h, n, "cell_backward: grad_h");
  require_len(x, p.input_dim, "cell_backward: input x");
  require_len(tr.h.span(), n, "cell_backward: trace h");

  CellInputGrads out;
  out.prev_h = Vector(n);
  out.x = Vector(p.input_dim);
  const auto h_prev = prev.h.span();
  Vector d_pre(n);

  switch (p.kind) {
    case CellKind::kSimpleRnn: {
      for (std::size_t j = 0; j < n; ++j) {
        d_pre[j] = grad_h[j] * tr.h[j] * (1.0 - tr.h[j]);
      }
      gate_backward(p, 0, x, h_prev, d_pre.span(), acc, out);
      break;
    }
    case CellKind::kGru: {
      const Vector& r = tr.gates[gru::kReset];
      const Vector& z = tr.gates[gru::kUpdate];
      const Vector& cand = tr.gates[gru::kNew];
      Vector d_cand_pre(n), d_z_pre(n), d_r_pre(n), d_hidden_proj(n);
      for (std::size_t j = 0; j < n; ++j) {
        const double dn = grad_h[j] * (1.0 - z[j]);
        const double dz = grad_h[j] * (h_prev[j] - cand[j]);
        out.prev_h[j] += grad_h[j] * z[j];
        d_cand_pre[j] = dn * (1.0 - cand[j] * cand[j]);
        d_hidden_proj[j] = d_cand_pre[j] * r[j];
        d_r_pre[j] = d_cand_pre[j] * tr.hidden_proj[j] * r[j] * (1.0 - r[j]);
        d_z_pre[j] = dz * z[j] * (1.0 - z[j]);
      }
      gate_backward(p, gru::kReset, x, h_prev, d_r_pre.span(), acc, out);
      gate_backward(p, gru::kUpdate, x, h_prev, d_z_pre.span(), acc, out);
      // The candidate gate splits: W_in/b_in see d_cand_pre, W_hn/b_hn see
      // d_cand_pre * r.
      add_outer(acc.input_weights[gru::kNew], d_cand_pre.span(), x);
      add_outer(acc.hidden_weights[gru::kNew], d_hidden_proj.span(), h_prev);
      for (std::size_t j = 0; j < n; ++j) {
        acc.input_biases[gru::kNew][j] += d_cand_pre[j];
        acc.hidden_biases[gru::kNew][j] += d_hidden_proj[j];
      }
      matvec_transposed_accumulate(p.input_weights[gru::kNew], d_cand_pre.span(),
                                   out.x.span());
      matvec_transposed_accumulate(p.hidden_weights[gru::kNew],
                                   d_hidden_proj.span(), out.prev_h.span());
      break;
    }
    case CellKind::kLstm: {
      require_len(prev.c.span(), n, "cell_backward: previous c");
      if (!grad_c.empty()) require_len(grad_c, n, "cell_backward: grad_c");
      const Vector& i = tr.gates[lstm::kInput];
      const Vector& f = tr.gates[lstm::kForget];
      const Vector& g = tr.gates[lstm::kCell];
      const Vector& o = tr.gates[lstm::kOutput];
      std::array<Vector, 4> d_gate_pre = {Vector(n), Vector(n), Vector(n), Vector(n)};
      out.prev_c = Vector(n);
      for (std::size_t j = 0; j < n; ++j) {
        const double tc = std::tanh(tr.c[j]);
        const double dc = (grad_c.empty() ? 0.0 : grad_c[j]) +
                          grad_h[j] * o[j] * (1.0 - tc * tc);
        const double d_o = grad_h[j] * tc;
        const double d_i = dc * g[j];
        const double d_f = dc * prev.c[j];
        const double d_g = dc * i[j];
        out.prev_c[j] = dc * f[j];
        d_gate_pre[lstm::kInput][j] = d_i * i[j] * (1.0 - i[j]);
        d_gate_pre[lstm::kForget][j] = d_f * f[j] * (1.0 - f[j]);
        d_gate_pre[lstm::kCell][j] = d_g * (1.0 - g[j] * g[j]);
        d_gate_pre[lstm::kOutput][j] = d_o * o[j] * (1.0 - o[j]);
      }
      for (std::size_t gate = 0; gate < 4; ++gate) {
        gate_backward(p, gate, x, h_prev, d_gate_pre[gate].span(), acc, out);
      }
      break;
    }
  }
  return out;
}

std::string_view to_string(InitKind kind) {
  switch (kind) {
    case InitKind::kUniform:
      return "uniform";
    case InitKind::kOrthogonal:
      return "orthogonal";
    case InitKind::kIdentity:
      return "identity";
    case InitKind::kNormal:
      return "normal";
  }
  return "?";
}

InitKind parse_init_kind(std::string_view name) {
  const std::string s = lower(name);
  if (s == "uniform") return InitKind::kUniform;
  if (s == "orthogonal") return InitKind::kOrthogonal;
  if (s == "identity") return InitKind::kIdentity;
  if (s == "normal") return InitKind::kNormal;
  throw std::invalid_argument("unknown init scheme '" + std::string(name) +
                              "' (expected uniform, orthogonal, identity or normal)");
}

Matrix random_orthogonal(std::size_t n, Rng& rng) {
  Matrix a(n, n);
  for (double& v : a.span()) v = rng.normal();
  // Modified Gram-Schmidt over columns, run twice per column so the result
  // is orthogonal to working precision. Positive norms give diag(R) > 0.
  Matrix q(n, n);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = a(i, j);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        double proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) proj += q(i, k) * col[i];
        for (std::size_t i = 0; i < n; ++i) col[i] -= proj * q(i, k);
      }
    }
    const double norm = norm2(col);
    if (norm == 0.0) throw std::runtime_error("random_orthogonal: rank-deficient draw");
    for (std::size_t i = 0; i < n; ++i) q(i, j) = col[i] / norm;
  }
  return q;
}

Matrix identity_init(std::size_t rows, std::size_t cols) {
  if (rows != cols) {
    throw std::invalid_argument("identity init needs a square matrix, got " +
                                std::to_string(rows) + "x" + std::to_string(cols));
  }
  return Matrix::identity(rows);
}

CellParams init_params(CellKind kind, std::size_t input_dim, std::size_t hidden_dim,
                       InitKind init, Rng& rng) {
  if (input_dim < 1 || hidden_dim < 1) {
    throw std::invalid_argument("init_params: input_dim and hidden_dim must be >= 1");
  }
  CellParams p = CellParams::zeros(kind, input_dim, hidden_dim);
  const double bound = uniform_bound(hidden_dim);
  const double normal_std = std::sqrt(1.0 / static_cast<double>(hidden_dim));
  for (auto& m : p.input_weights) fill_uniform(m.span(), bound, rng);
  for (auto& m : p.hidden_weights) {
    switch (init) {
      case InitKind::kUniform:
        fill_uniform(m.span(), bound, rng);
        break;
      case InitKind::kOrthogonal:
        m = random_orthogonal(hidden_dim, rng);
        break;
      case InitKind::kIdentity:
        m = identity_init(m.rows(), m.cols());
        break;
      case InitKind::kNormal:
        for (double& v : m.span()) v = normal_std * rng.normal();
        break;
    }
  }
  for (auto& b : p.input_biases) fill_uniform(b.span(), bound, rng);
  for (auto& b : p.hidden_biases) fill_uniform(b.span(), bound, rng);
  return p;
}

CellParams init_params(CellKind kind, std::size_t input_dim, std::size_t hidden_dim,
                       const InitScheme& scheme) {
  Rng rng(scheme.seed);
  return init_params(kind, input_dim, hidden_dim, scheme.kind, rng);
}

}  // namespace nv
