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

// Labelled sequence data: UCR text files, padding to a fixed horizon, and a
// synthetic generator for tests.
//
// UCR rows are "label<sep>x_1<sep>...<sep>x_T" with <sep> a tab or a comma
// (detected per file). The multivariate variant keeps tabs between steps and
// writes each step as m comma-separated values: "label\tx11,x12\tx21,x22...".

#ifndef NEUROVIEW_DATA_H_
#define NEUROVIEW_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "neuroview/linalg.h"

namespace nv {

struct SequenceSample {
  Matrix features;  // steps x feature_dim
  std::size_t true_length = 0;
  std::size_t label = 0;

  friend bool operator==(const SequenceSample&, const SequenceSample&) = default;
};

struct DataSet {
  std::vector<SequenceSample> samples;
  std::size_t num_classes = 0;
  std::size_t feature_dim = 1;
  std::size_t horizon = 0;
  // label_values[k] is the raw file label mapped to class k (sorted order).
  std::vector<double> label_values;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  // Per-class sample counts.
  std::vector<std::size_t> class_counts() const;

  friend bool operator==(const DataSet&, const DataSet&) = default;
};

// Parse failure with the offending location.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadOptions {
  // Map raw labels through this sorted list instead of building one from the
  // file. Used to give a test split the same class ids as its train split.
  std::optional<std::vector<double>> label_values;
  // Require at least two classes (off when loading with a fixed mapping).
  bool require_two_classes = true;
};

DataSet load_ucr(const std::filesystem::path& path, const LoadOptions& options = {});

struct Split {
  DataSet train;
  DataSet test;
};

// Loads both files with one shared label mapping built from their union, and
// pads the test split to the train horizon.
Split load_ucr_split(const std::filesystem::path& train_path,
                     const std::filesystem::path& test_path);

// Writes samples back in the format load_ucr reads (tab-separated, shortest
// round-trip number formatting, raw labels).
void save_ucr(const DataSet& data, const std::filesystem::path& path);

// Zero-pads at the tail or keeps the first `horizon` steps. true_length is
// carried over unchanged.
SequenceSample pad_sequence(const SequenceSample& sample, std::size_t horizon);

// Pads every sample and sets data.horizon.
void pad_dataset(DataSet& data, std::size_t horizon);

// Per-series, per-feature z-normalisation over the first true_length steps.
// Constant series are only centred.
void znormalize(DataSet& data);

struct SynthOptions {
  double amplitude = 2.0;       // offset added inside the class window
  double noise_std = 0.1;       // noise inside the signal region
  double tail_noise_std = 0.1;  // noise after the last class window
  std::size_t window = 0;       // steps per class window; 0 = max(1, T / (2d))
};

// Class k gets +amplitude on every feature over steps [k*w, (k+1)*w), on top
// of Gaussian noise. Steps from d*w on carry only tail noise. Throws
// std::invalid_argument when classes < 2 or the windows do not fit in T.
DataSet synth_separable(std::size_t classes, std::size_t horizon,
                        std::size_t feature_dim, std::size_t per_class,
                        std::uint64_t seed, const SynthOptions& options = {});

}  // namespace nv

#endif  // NEUROVIEW_DATA_H_
