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

// Recurrence cells: one forward step, one backward (BPTT) step, and the
// parameter initialisation schemes.
//
//   SimpleRNN  h = sigmoid(W h_prev + U x + b)
//   GRU        r = sigmoid(W_ir x + b_ir + W_hr h_prev + b_hr)
//              z = sigmoid(W_iz x + b_iz + W_hz h_prev + b_hz)
//              n = tanh(W_in x + b_in + r * (W_hn h_prev + b_hn))
//              h = (1 - z) * n + z * h_prev
//   LSTM       i, f, o = sigmoid(W_i* x + b_i* + W_h* h_prev + b_h*)
//              g = tanh(W_ig x + b_ig + W_hg h_prev + b_hg)
//              c = f * c_prev + i * g
//              h = o * tanh(c)

#ifndef NEUROVIEW_CELLS_H_
#define NEUROVIEW_CELLS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "neuroview/linalg.h"
#include "neuroview/random.h"

namespace nv {

enum class CellKind { kSimpleRnn, kGru, kLstm };

std::string_view to_string(CellKind kind);
// Accepts "rnn", "gru", "lstm" (case-insensitive). Throws on anything else.
CellKind parse_cell_kind(std::string_view name);

// Number of gate blocks: 1 for SimpleRNN, 3 for GRU (r, z, n), 4 for LSTM
// (i, f, g, o).
std::size_t gate_count(CellKind kind);

namespace gru {
inline constexpr std::size_t kReset = 0;
inline constexpr std::size_t kUpdate = 1;
inline constexpr std::size_t kNew = 2;
}  // namespace gru

namespace lstm {
inline constexpr std::size_t kInput = 0;
inline constexpr std::size_t kForget = 1;
inline constexpr std::size_t kCell = 2;
inline constexpr std::size_t kOutput = 3;
}  // namespace lstm

// Named view over one parameter block, used by the optimizer, the
// checkpoint writer and the finite-difference tests.
template <typename T>
struct BasicParamView {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::span<T> values;
};
using ParamView = BasicParamView<double>;
using ConstParamView = BasicParamView<const double>;

// Learnable parameters of one cell. Gate g of the cell uses
// input_weights[g] (n x m), hidden_weights[g] (n x n), input_biases[g] and,
// for GRU/LSTM, hidden_biases[g]. SimpleRNN keeps a single bias and no
// hidden_biases: U = input_weights[0], W = hidden_weights[0],
// b = input_biases[0].
struct CellParams {
  CellKind kind = CellKind::kSimpleRnn;
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::vector<Matrix> input_weights;
  std::vector<Matrix> hidden_weights;
  std::vector<Vector> input_biases;
  std::vector<Vector> hidden_biases;

  static CellParams zeros(CellKind kind, std::size_t input_dim,
                          std::size_t hidden_dim);
  // Same shapes, all zero. Used as a gradient accumulator.
  CellParams zeros_like() const { return zeros(kind, input_dim, hidden_dim); }

  // Blocks in a fixed order: input weights, hidden weights, input biases,
  // hidden biases, each in gate order. Names follow the usual convention
  // (W_ir, W_hz, b_io, ... and U, W, b for SimpleRNN).
  std::vector<ParamView> views();
  std::vector<ConstParamView> views() const;
  std::size_t parameter_count() const;

  // Throws std::invalid_argument naming the first block whose shape does not
  // match (kind, input_dim, hidden_dim).
  void validate() const;

  friend bool operator==(const CellParams&, const CellParams&) = default;
};

struct CellState {
  Vector h;
  Vector c;  // empty unless the cell is an LSTM

  static CellState zeros(CellKind kind, std::size_t hidden_dim);
};

// Everything the backward step needs from one forward step.
//   SimpleRNN: h.
//   GRU: gates {r, z, n}, hidden_proj = W_hn h_prev + b_hn, h.
//   LSTM: gates {i, f, g, o}, c, h.
struct GateTrace {
  CellKind kind = CellKind::kSimpleRnn;
  std::vector<Vector> gates;
  Vector hidden_proj;
  Vector c;
  Vector h;
};

struct CellStep {
  CellState state;
  GateTrace trace;
};

CellStep cell_forward(const CellParams& params, const CellState& state,
                      std::span<const double> x);
inline CellStep cell_forward(const CellParams& params, const CellState& state,
                             const Vector& x) {
  return cell_forward(params, state, x.span());
}

struct CellInputGrads {
  Vector prev_h;
  Vector prev_c;  // empty unless LSTM
  Vector x;
};

// One BPTT stage. grad_h is dL/dh for this step's output and grad_c the
// gradient flowing into this step's cell state from the next step (LSTM
// only; pass an empty span otherwise or to mean zero). Parameter gradients
// are added into grad_accum, which must have the shapes of params.
CellInputGrads cell_backward(const CellParams& params, const GateTrace& trace,
                             const CellState& prev_state,
                             std::span<const double> x,
                             std::span<const double> grad_h,
                             std::span<const double> grad_c,
                             CellParams& grad_accum);

enum class InitKind { kUniform, kOrthogonal, kIdentity, kNormal };

std::string_view to_string(InitKind kind);
InitKind parse_init_kind(std::string_view name);

struct InitScheme {
  InitKind kind = InitKind::kUniform;
  std::uint64_t seed = 0;
};

// Hidden-to-hidden matrices follow the scheme; input-to-hidden matrices and
// all biases use U(-1/sqrt(n), 1/sqrt(n)). Deterministic in the seed.
CellParams init_params(CellKind kind, std::size_t input_dim,
                       std::size_t hidden_dim, const InitScheme& scheme);

// Same, drawing from a caller-owned generator (lets a network initialise
// several cells from one seeded stream).
CellParams init_params(CellKind kind, std::size_t input_dim,
                       std::size_t hidden_dim, InitKind kind_of_init, Rng& rng);

// Q factor of the QR decomposition of an n x n standard-normal draw, with
// column signs fixed so diag(R) > 0.
Matrix random_orthogonal(std::size_t n, Rng& rng);

// Exact identity. Throws std::invalid_argument when rows != cols.
Matrix identity_init(std::size_t rows, std::size_t cols);

}  // namespace nv

#endif  // NEUROVIEW_CELLS_H_
