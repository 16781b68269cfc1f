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

// Reading a trained NeuroView head: per-class timestep weight maps, cosine
// similarity between class weight rows, and Time Analysis counterfactuals
// that blank the timesteps a class weighs most (or least) and re-evaluate.

#ifndef NEUROVIEW_INTERPRET_H_
#define NEUROVIEW_INTERPRET_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "neuroview/data.h"
#include "neuroview/linalg.h"
#include "neuroview/network.h"
#include "neuroview/train.h"

namespace nv {

// Class row v_i of V viewed as (timestep x unit). A timestep block has
// blocks_per_step sub-blocks of hidden_dim units, one per (layer, direction).
struct WeightMap {
  std::size_t class_index = 0;
  std::size_t horizon = 0;
  std::size_t blocks_per_step = 1;
  std::size_t hidden_dim = 0;
  // Mean over the hidden units of each sub-block; index t * blocks_per_step + b.
  Vector block_means;
  // horizon x (blocks_per_step * hidden_dim); row-major flattening is v_i.
  Matrix per_unit;

  // Means of one (layer, direction) sub-block over time, length horizon.
  Vector step_means(std::size_t block = 0) const;

  friend bool operator==(const WeightMap&, const WeightMap&) = default;
};

// Throws std::invalid_argument for a non-NeuroView head or a bad class.
WeightMap weight_map(const HeadParams& head, const EncoderConfig& cfg,
                     std::size_t class_index);

// d x d matrix of cosine similarities between class rows of V. Throws when a
// row has zero norm (naming the class) or when there are fewer than 2 classes.
Matrix class_similarity(const HeadParams& head);

enum class CounterfactualMode { kTopPositive, kTopNegative };
enum class Ablation { kZeroInputs, kZeroWeights };

std::string_view to_string(CounterfactualMode mode);
CounterfactualMode parse_counterfactual_mode(std::string_view name);
std::string_view to_string(Ablation ablation);

struct TimeAnalysisOptions {
  // kZeroInputs blanks the input features at the chosen steps for every
  // sample. kZeroWeights instead zeroes the class's V entries for those steps.
  Ablation ablation = Ablation::kZeroInputs;
  // Which (layer, direction) sub-block ranks the timesteps.
  std::size_t rank_block = 0;
};

// The k timesteps with the largest (TopPositive) or smallest (TopNegative)
// mean weight of the chosen sub-block; equal means go to the lower index.
std::vector<std::size_t> rank_timesteps(const WeightMap& map, std::size_t k,
                                        CounterfactualMode mode,
                                        std::size_t rank_block = 0);

struct CounterfactualResult {
  std::size_t class_index = 0;
  std::size_t k = 0;
  CounterfactualMode mode = CounterfactualMode::kTopPositive;
  Ablation ablation = Ablation::kZeroInputs;
  std::vector<std::size_t> zeroed_steps;
  EvalReport report;
};

// Zeros the input features at `steps` (all features) in every sample.
DataSet zero_timesteps(const DataSet& data, const std::vector<std::size_t>& steps);

CounterfactualResult time_analysis(const Model& model, const DataSet& data,
                                   std::size_t class_index, std::size_t k,
                                   CounterfactualMode mode,
                                   const TimeAnalysisOptions& options = {});

// Every class ablated with its own top-k steps; overall accuracy counts the
// class-c samples that stay correct under class c's ablation.
struct ClassTargetedResult {
  std::size_t k = 0;
  CounterfactualMode mode = CounterfactualMode::kTopPositive;
  std::vector<std::vector<std::size_t>> zeroed_steps;  // per class
  std::vector<double> per_class_accuracy;
  double overall_accuracy = 0.0;
};

ClassTargetedResult class_targeted_analysis(const Model& model, const DataSet& data,
                                            std::size_t k, CounterfactualMode mode,
                                            const TimeAnalysisOptions& options = {});

// CSV with one row per timestep. Single-block models use the columns
// timestep,mean_weight,unit_0..unit_{n-1}; stacked or bidirectional models
// add layer and direction columns and emit one row per sub-block.
void write_weight_map_csv(const WeightMap& map, const EncoderConfig& cfg,
                          const std::filesystem::path& path);
WeightMap read_weight_map_csv(const std::filesystem::path& path,
                              std::size_t class_index);

void write_similarity_csv(const Matrix& similarity, const std::filesystem::path& path);
Matrix read_similarity_csv(const std::filesystem::path& path);

// Serialises counterfactual rows (and optional class-targeted rows) as JSON.
std::string counterfactuals_to_json(const std::vector<CounterfactualResult>& rows,
                                    const std::vector<ClassTargetedResult>& targeted = {});

struct ReportFiles {
  std::vector<std::filesystem::path> weight_maps;
  std::optional<std::filesystem::path> similarity;
  std::optional<std::filesystem::path> counterfactuals;
  std::filesystem::path manifest;
};

// Writes class_<i>_weights.csv per map, similarity.csv when given,
// counterfactuals.json when there are rows, and manifest.json listing them.
ReportFiles export_report(const std::vector<WeightMap>& maps, const EncoderConfig& cfg,
                          const std::optional<Matrix>& similarity,
                          const std::vector<CounterfactualResult>& counterfactuals,
                          const std::filesystem::path& directory,
                          const std::vector<ClassTargetedResult>& targeted = {});

}  // namespace nv

#endif  // NEUROVIEW_INTERPRET_H_
