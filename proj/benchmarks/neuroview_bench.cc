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

#include <benchmark/benchmark.h>

#include "neuroview/cells.h"
#include "neuroview/data.h"
#include "neuroview/network.h"
#include "neuroview/train.h"

namespace nv {
namespace {

CellKind cell_arg(int64_t i) {
  return i == 0 ? CellKind::kSimpleRnn : i == 1 ? CellKind::kGru : CellKind::kLstm;
}

void BM_CellForward(benchmark::State& state) {
  const CellKind kind = cell_arg(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const CellParams p = init_params(kind, 1, n, InitScheme{InitKind::kUniform, 1});
  const CellState s = CellState::zeros(kind, n);
  const Vector x{0.5};
  for (auto _ : state) benchmark::DoNotOptimize(cell_forward(p, s, x));
}
BENCHMARK(BM_CellForward)->ArgsProduct({{0, 1, 2}, {32, 128}});

void BM_CellBackward(benchmark::State& state) {
  const CellKind kind = cell_arg(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const CellParams p = init_params(kind, 1, n, InitScheme{InitKind::kUniform, 1});
  const CellState s = CellState::zeros(kind, n);
  const Vector x{0.5};
  const CellStep step = cell_forward(p, s, x);
  const Vector gh(n, 1.0);
  CellParams grads = p.zeros_like();
  for (auto _ : state) {
    benchmark::DoNotOptimize(cell_backward(p, step.trace, s, x.span(), gh.span(), {}, grads));
  }
}
BENCHMARK(BM_CellBackward)->ArgsProduct({{0, 1, 2}, {32, 128}});

void BM_NeuroViewForward(benchmark::State& state) {
  ModelSpec spec;
  spec.encoder.cell = CellKind::kGru;
  spec.encoder.hidden_dim = 32;
  spec.encoder.horizon = static_cast<std::size_t>(state.range(0));
  spec.num_classes = 4;
  const Model model = init_model(spec, 1);
  const Matrix x(spec.encoder.horizon, 1, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(forward(model, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NeuroViewForward)->Arg(24)->Arg(128)->Arg(512);

void BM_TrainEpoch(benchmark::State& state) {
  const DataSet data = synth_separable(2, 24, 1, 10, 3);
  ModelSpec spec;
  spec.encoder.hidden_dim = static_cast<std::size_t>(state.range(0));
  spec.encoder.horizon = 24;
  TrainConfig cfg;
  cfg.epochs = 1;
  Model model = init_model(spec, 1);
  for (auto _ : state) benchmark::DoNotOptimize(fit(data, cfg, model));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(data.size()));
}
BENCHMARK(BM_TrainEpoch)->Arg(32)->Arg(64)->Arg(128);

}  // namespace
}  // namespace nv

BENCHMARK_MAIN();
