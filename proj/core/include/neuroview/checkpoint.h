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

// Run configuration files and model checkpoints.
//
// A run config is flat "key = value" text; '#' starts a comment. Saving
// writes every key, defaults included, in sorted order.
//
// A checkpoint is JSON. Floating-point arrays are base64 of little-endian
// IEEE-754 doubles so a load/save cycle reproduces the file byte for byte.

#ifndef NEUROVIEW_CHECKPOINT_H_
#define NEUROVIEW_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "neuroview/network.h"
#include "neuroview/train.h"

namespace nv {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string dataset;     // UCR name resolved against the data directory
  std::string train_path;  // explicit paths win over `dataset`
  std::string test_path;
  EncoderConfig encoder;   // input_dim and horizon of 0 mean "from the data"
  HeadKind head = HeadKind::kNeuroView;
  bool mean_pool = false;
  InitKind init = InitKind::kUniform;
  TrainConfig train;
  bool znorm = false;
  std::string output_dir = "runs";

  RunConfig();

  // Key/value pairs, one per field, values as written to the file.
  std::map<std::string, std::string> to_pairs() const;
  // Applies one key. Throws ConfigError naming the key on a bad value or an
  // unknown key.
  void set(std::string_view key, std::string_view value);

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

std::string format_run_config(const RunConfig& config);
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const RunConfig& config, const std::filesystem::path& path);

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  RunConfig config;
  Model model;
  std::optional<AdamState> optimizer;
  std::map<std::string, double> metrics;
  std::uint64_t seed = 0;
  std::vector<double> label_values;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

std::string checkpoint_to_json(const Checkpoint& checkpoint);
// Throws CheckpointError on a version mismatch or malformed content.
Checkpoint checkpoint_from_json(std::string_view text);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string encode_doubles(std::span<const double> values);
std::vector<double> decode_doubles(std::string_view base64);

}  // namespace nv

#endif  // NEUROVIEW_CHECKPOINT_H_
