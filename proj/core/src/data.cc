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

#include "neuroview/data.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "neuroview/random.h"
#include "neuroview/text_io.h"

namespace nv {
namespace {

struct RawRow {
  double label = 0.0;
  std::vector<std::vector<double>> steps;  // steps x m
};

struct RawFile {
  std::vector<RawRow> rows;
  std::size_t steps = 0;
  std::size_t feature_dim = 0;
};

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

double parse_field(std::string_view field, const std::filesystem::path& path,
                   std::size_t line, std::size_t column) {
  const std::string_view f = trim(field);
  if (f.empty()) {
    throw DataError(where(path, line) + ": column " + std::to_string(column) + ": missing value");
  }
  const auto v = parse_double(f);
  if (!v) {
    throw DataError(where(path, line) + ": column " + std::to_string(column) +
                    ": cannot parse '" + std::string(f) + "' as a number");
  }
  if (!std::isfinite(*v)) {
    throw DataError(where(path, line) + ": column " + std::to_string(column) +
                    ": missing or non-finite value");
  }
  return *v;
}

RawFile parse_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  RawFile file;
  std::size_t line_no = 0;
  bool have_shape = false;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;

    const bool tabbed = line.find('\t') != std::string_view::npos;
    const auto fields = split(line, tabbed ? '\t' : ',');
    if (fields.size() < 2) {
      throw DataError(where(path, line_no) + ": row has a label but no values");
    }
    RawRow row;
    row.label = parse_field(fields[0], path, line_no, 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      std::vector<double> step;
      if (tabbed && fields[i].find(',') != std::string_view::npos) {
        for (auto part : split(fields[i], ',')) {
          step.push_back(parse_field(part, path, line_no, i + 1));
        }
      } else {
        step.push_back(parse_field(fields[i], path, line_no, i + 1));
      }
      if (!row.steps.empty() && step.size() != row.steps.front().size()) {
        throw DataError(where(path, line_no) + ": step " + std::to_string(i) +
                        " has " + std::to_string(step.size()) +
                        " features, earlier steps have " +
                        std::to_string(row.steps.front().size()));
      }
      row.steps.push_back(std::move(step));
    }
    if (!have_shape) {
      file.steps = row.steps.size();
      file.feature_dim = row.steps.front().size();
      have_shape = true;
    } else if (row.steps.size() != file.steps ||
               row.steps.front().size() != file.feature_dim) {
      throw DataError(where(path, line_no) + ": ragged row with " +
                      std::to_string(row.steps.size()) + " steps of " +
                      std::to_string(row.steps.front().size()) +
                      " features; earlier rows have " + std::to_string(file.steps) +
                      " steps of " + std::to_string(file.feature_dim));
    }
    file.rows.push_back(std::move(row));
  }
  if (file.rows.empty()) throw DataError(path.string() + ": no data rows");
  return file;
}

std::vector<double> sorted_labels(const std::vector<const RawFile*>& files) {
  std::set<double> labels;
  for (const RawFile* f : files) {
    for (const auto& r : f->rows) labels.insert(r.label);
  }
  return {labels.begin(), labels.end()};
}

DataSet to_dataset(const RawFile& file, const std::vector<double>& label_values,
                   const std::filesystem::path& path) {
  DataSet data;
  data.num_classes = label_values.size();
  data.feature_dim = file.feature_dim;
  data.horizon = file.steps;
  data.label_values = label_values;
  data.samples.reserve(file.rows.size());
  for (std::size_t r = 0; r < file.rows.size(); ++r) {
    const RawRow& row = file.rows[r];
    const auto it = std::lower_bound(label_values.begin(), label_values.end(), row.label);
    if (it == label_values.end() || *it != row.label) {
      throw DataError(path.string() + ": row " + std::to_string(r + 1) + " has label " +
                      format_double(row.label) + " outside the class mapping");
    }
    SequenceSample s;
    s.label = static_cast<std::size_t>(it - label_values.begin());
    s.true_length = file.steps;
    s.features = Matrix(file.steps, file.feature_dim);
    for (std::size_t t = 0; t < file.steps; ++t) {
      for (std::size_t j = 0; j < file.feature_dim; ++j) {
        s.features(t, j) = row.steps[t][j];
      }
    }
    data.samples.push_back(std::move(s));
  }
  return data;
}

void require_classes(const std::vector<double>& labels, const std::filesystem::path& path) {
  if (labels.size() < 2) {
    throw DataError(path.string() + ": found " + std::to_string(labels.size()) +
                    " class(es); classification needs at least 2");
  }
}

}  // namespace

std::vector<std::size_t> DataSet::class_counts() const {
  std::vector<std::size_t> counts(num_classes, 0);
  for (const auto& s : samples) ++counts.at(s.label);
  return counts;
}

DataSet load_ucr(const std::filesystem::path& path, const LoadOptions& options) {
  const RawFile file = parse_file(path);
  std::vector<double> labels =
      options.label_values ? *options.label_values : sorted_labels({&file});
  if (options.require_two_classes) require_classes(labels, path);
  return to_dataset(file, labels, path);
}

Split load_ucr_split(const std::filesystem::path& train_path,
                     const std::filesystem::path& test_path) {
  const RawFile train = parse_file(train_path);
  const RawFile test = parse_file(test_path);
  if (train.feature_dim != test.feature_dim) {
    throw DataError(test_path.string() + ": has " + std::to_string(test.feature_dim) +
                    " features per step, train split has " +
                    std::to_string(train.feature_dim));
  }
  const std::vector<double> labels = sorted_labels({&train, &test});
  require_classes(labels, train_path);
  Split split{to_dataset(train, labels, train_path), to_dataset(test, labels, test_path)};
  if (split.test.horizon != split.train.horizon) pad_dataset(split.test, split.train.horizon);
  return split;
}

void save_ucr(const DataSet& data, const std::filesystem::path& path) {
  std::string out;
  for (const auto& s : data.samples) {
    out += format_double(data.label_values.at(s.label));
    for (std::size_t t = 0; t < s.features.rows(); ++t) {
      out += '\t';
      for (std::size_t j = 0; j < s.features.cols(); ++j) {
        if (j) out += ',';
        out += format_double(s.features(t, j));
      }
    }
    out += '\n';
  }
  write_file(path, out);
}

SequenceSample pad_sequence(const SequenceSample& sample, std::size_t horizon) {
  SequenceSample out;
  out.label = sample.label;
  out.true_length = sample.true_length;
  const std::size_t m = sample.features.cols();
  out.features = Matrix(horizon, m);
  const std::size_t keep = std::min(horizon, sample.features.rows());
  std::copy_n(sample.features.data(), keep * m, out.features.data());
  return out;
}

void pad_dataset(DataSet& data, std::size_t horizon) {
  if (horizon < 1) throw std::invalid_argument("pad_dataset: horizon must be >= 1");
  for (auto& s : data.samples) s = pad_sequence(s, horizon);
  data.horizon = horizon;
}

void znormalize(DataSet& data) {
  for (auto& s : data.samples) {
    const std::size_t len = std::min(s.true_length, s.features.rows());
    if (len == 0) continue;
    for (std::size_t j = 0; j < s.features.cols(); ++j) {
      double mean = 0.0;
      for (std::size_t t = 0; t < len; ++t) mean += s.features(t, j);
      mean /= static_cast<double>(len);
      double var = 0.0;
      for (std::size_t t = 0; t < len; ++t) {
        const double dv = s.features(t, j) - mean;
        var += dv * dv;
      }
      const double sd = std::sqrt(var / static_cast<double>(len));
      for (std::size_t t = 0; t < len; ++t) {
        s.features(t, j) -= mean;
        if (sd > 0.0) s.features(t, j) /= sd;
      }
    }
  }
}

DataSet synth_separable(std::size_t classes, std::size_t horizon,
                        std::size_t feature_dim, std::size_t per_class,
                        std::uint64_t seed, const SynthOptions& options) {
  if (classes < 2) throw std::invalid_argument("synth_separable: need at least 2 classes");
  if (horizon < 1 || feature_dim < 1 || per_class < 1) {
    throw std::invalid_argument("synth_separable: horizon, feature_dim and per_class must be >= 1");
  }
  const std::size_t window =
      options.window ? options.window : std::max<std::size_t>(1, horizon / (2 * classes));
  if (window * classes > horizon) {
    throw std::invalid_argument("synth_separable: " + std::to_string(classes) +
                                " windows of " + std::to_string(window) +
                                " steps do not fit in horizon " + std::to_string(horizon));
  }
  const std::size_t signal_end = window * classes;
  Rng rng(seed);
  DataSet data;
  data.num_classes = classes;
  data.feature_dim = feature_dim;
  data.horizon = horizon;
  for (std::size_t k = 0; k < classes; ++k) data.label_values.push_back(static_cast<double>(k));
  for (std::size_t i = 0; i < per_class; ++i) {
    for (std::size_t k = 0; k < classes; ++k) {
      SequenceSample s;
      s.label = k;
      s.true_length = horizon;
      s.features = Matrix(horizon, feature_dim);
      for (std::size_t t = 0; t < horizon; ++t) {
        const bool tail = t >= signal_end;
        const double sd = tail ? options.tail_noise_std : options.noise_std;
        const double offset = (t >= k * window && t < (k + 1) * window) ? options.amplitude : 0.0;
        for (std::size_t j = 0; j < feature_dim; ++j) {
          s.features(t, j) = offset + sd * rng.normal();
        }
      }
      data.samples.push_back(std::move(s));
    }
  }
  return data;
}

}  // namespace nv
