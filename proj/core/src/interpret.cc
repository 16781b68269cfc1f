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

#include "neuroview/interpret.h"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "neuroview/text_io.h"

namespace nv {
namespace {

using json = nlohmann::json;

void require_neuroview(const HeadParams& head) {
  if (head.kind != HeadKind::kNeuroView) {
    throw std::invalid_argument(
        "interpretability requires NV head: a " + std::string(to_string(head.kind)) +
        " head has one weight per hidden unit, not one per timestep");
  }
}

void require_class(std::size_t class_index, std::size_t classes) {
  if (class_index >= classes) {
    throw std::out_of_range("class " + std::to_string(class_index) +
                            " out of range for " + std::to_string(classes) + " classes");
  }
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

json report_json(const EvalReport& r) {
  return json{{"overall_accuracy", r.overall_accuracy},
              {"per_class_accuracy", r.per_class_accuracy},
              {"confusion", r.confusion},
              {"total", r.total}};
}

std::vector<std::vector<double>> parse_csv_numbers(const std::filesystem::path& path,
                                                   std::vector<std::string>& header) {
  const std::string text = read_file(path);
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (header.empty()) {
      for (auto f : fields) header.emplace_back(trim(f));
      continue;
    }
    if (fields.size() != header.size()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " fields, got " +
                               std::to_string(fields.size()));
    }
    std::vector<double> row;
    for (auto f : fields) {
      const auto v = parse_double(trim(f));
      if (!v) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": bad number '" + std::string(f) + "'");
      }
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Vector WeightMap::step_means(std::size_t block) const {
  if (block >= blocks_per_step) {
    throw std::out_of_range("step_means: block " + std::to_string(block) + " of " +
                            std::to_string(blocks_per_step));
  }
  Vector out(horizon);
  for (std::size_t t = 0; t < horizon; ++t) out[t] = block_means[t * blocks_per_step + block];
  return out;
}

WeightMap weight_map(const HeadParams& head, const EncoderConfig& cfg,
                     std::size_t class_index) {
  require_neuroview(head);
  require_class(class_index, head.num_classes());
  const std::size_t width = cfg.head_width(HeadKind::kNeuroView);
  if (head.weights.cols() != width) {
    throw std::invalid_argument("weight_map: V has " + std::to_string(head.weights.cols()) +
                                " columns, encoder config implies " + std::to_string(width));
  }
  WeightMap map;
  map.class_index = class_index;
  map.horizon = cfg.horizon;
  map.blocks_per_step = cfg.blocks_per_step();
  map.hidden_dim = cfg.hidden_dim;
  const std::size_t step_width = cfg.step_block_width();
  map.per_unit = Matrix(cfg.horizon, step_width);
  const auto row = head.weights.row(class_index);
  std::copy(row.begin(), row.end(), map.per_unit.data());
  map.block_means = Vector(cfg.horizon * map.blocks_per_step);
  const double n = static_cast<double>(cfg.hidden_dim);
  for (std::size_t t = 0; t < cfg.horizon; ++t) {
    for (std::size_t b = 0; b < map.blocks_per_step; ++b) {
      const auto units = map.per_unit.row(t).subspan(b * cfg.hidden_dim, cfg.hidden_dim);
      map.block_means[t * map.blocks_per_step + b] =
          std::accumulate(units.begin(), units.end(), 0.0) / n;
    }
  }
  return map;
}

Matrix class_similarity(const HeadParams& head) {
  require_neuroview(head);
  const std::size_t d = head.num_classes();
  if (d < 2) throw std::invalid_argument("class_similarity: need at least 2 classes");
  std::vector<double> norms(d);
  for (std::size_t i = 0; i < d; ++i) {
    norms[i] = norm2(head.weights.row(i));
    if (norms[i] == 0.0) {
      throw std::invalid_argument("class_similarity: class " + std::to_string(i) +
                                  " has an all-zero weight row");
    }
  }
  Matrix sim(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    sim(i, i) = 1.0;
    for (std::size_t j = i + 1; j < d; ++j) {
      double c = dot(head.weights.row(i), head.weights.row(j)) / (norms[i] * norms[j]);
      c = std::clamp(c, -1.0, 1.0);
      sim(i, j) = c;
      sim(j, i) = c;
    }
  }
  return sim;
}

std::string_view to_string(CounterfactualMode mode) {
  return mode == CounterfactualMode::kTopPositive ? "top_positive" : "top_negative";
}

CounterfactualMode parse_counterfactual_mode(std::string_view name) {
  const std::string s = lower(name);
  if (s == "top_positive" || s == "toppositive" || s == "positive" || s == "pos") return CounterfactualMode::kTopPositive;
  if (s == "top_negative" || s == "topnegative" || s == "negative" || s == "neg") return CounterfactualMode::kTopNegative;
  throw std::invalid_argument("unknown counterfactual mode '" + std::string(name) +
                              "' (expected top_positive or top_negative)");
}

std::string_view to_string(Ablation ablation) {
  return ablation == Ablation::kZeroInputs ? "inputs" : "weights";
}

std::vector<std::size_t> rank_timesteps(const WeightMap& map, std::size_t k,
                                        CounterfactualMode mode, std::size_t rank_block) {
  if (k > map.horizon) {
    throw std::invalid_argument("k = " + std::to_string(k) + " exceeds horizon " +
                                std::to_string(map.horizon));
  }
  const Vector means = map.step_means(rank_block);
  std::vector<std::size_t> order(map.horizon);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const bool descending = mode == CounterfactualMode::kTopPositive;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return descending ? means[a] > means[b] : means[a] < means[b];
  });
  order.resize(k);
  return order;
}

DataSet zero_timesteps(const DataSet& data, const std::vector<std::size_t>& steps) {
  DataSet out = data;
  for (auto& s : out.samples) {
    for (std::size_t t : steps) {
      if (t >= s.features.rows()) {
        throw std::out_of_range("zero_timesteps: step " + std::to_string(t) +
                                " beyond sequence length " +
                                std::to_string(s.features.rows()));
      }
      for (double& v : s.features.row(t)) v = 0.0;
    }
  }
  return out;
}

CounterfactualResult time_analysis(const Model& model, const DataSet& data,
                                   std::size_t class_index, std::size_t k,
                                   CounterfactualMode mode,
                                   const TimeAnalysisOptions& options) {
  require_neuroview(model.head);
  require_class(class_index, model.num_classes());
  if (k > model.encoder.horizon) {
    throw std::invalid_argument("time_analysis: k = " + std::to_string(k) +
                                " exceeds horizon " + std::to_string(model.encoder.horizon));
  }
  const WeightMap map = weight_map(model.head, model.encoder, class_index);
  CounterfactualResult result;
  result.class_index = class_index;
  result.k = k;
  result.mode = mode;
  result.ablation = options.ablation;
  result.zeroed_steps = rank_timesteps(map, k, mode, options.rank_block);

  if (options.ablation == Ablation::kZeroInputs) {
    result.report = evaluate(model, zero_timesteps(data, result.zeroed_steps));
  } else {
    Model ablated = model;
    const std::size_t block = model.encoder.step_block_width();
    auto row = ablated.head.weights.row(class_index);
    for (std::size_t t : result.zeroed_steps) {
      std::fill_n(row.begin() + t * block, block, 0.0);
    }
    result.report = evaluate(ablated, data);
  }
  return result;
}

ClassTargetedResult class_targeted_analysis(const Model& model, const DataSet& data,
                                            std::size_t k, CounterfactualMode mode,
                                            const TimeAnalysisOptions& options) {
  const std::size_t d = model.num_classes();
  ClassTargetedResult out;
  out.k = k;
  out.mode = mode;
  out.per_class_accuracy.assign(d, 0.0);
  std::size_t correct = 0;
  for (std::size_t c = 0; c < d; ++c) {
    CounterfactualResult r = time_analysis(model, data, c, k, mode, options);
    if (c < r.report.confusion.size()) correct += r.report.confusion[c][c];
    out.per_class_accuracy[c] = r.report.per_class_accuracy[c];
    out.zeroed_steps.push_back(std::move(r.zeroed_steps));
  }
  out.overall_accuracy =
      data.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(data.size());
  return out;
}

void write_weight_map_csv(const WeightMap& map, const EncoderConfig& cfg,
                          const std::filesystem::path& path) {
  const bool single = map.blocks_per_step == 1;
  std::string out = single ? "timestep,mean_weight" : "timestep,layer,direction,mean_weight";
  for (std::size_t u = 0; u < map.hidden_dim; ++u) out += ",unit_" + std::to_string(u);
  out += '\n';
  for (std::size_t t = 0; t < map.horizon; ++t) {
    for (std::size_t b = 0; b < map.blocks_per_step; ++b) {
      out += std::to_string(t);
      if (!single) {
        out += "," + std::to_string(b / cfg.directions()) + "," +
               std::to_string(b % cfg.directions());
      }
      out += "," + format_double(map.block_means[t * map.blocks_per_step + b]);
      const auto units = map.per_unit.row(t).subspan(b * map.hidden_dim, map.hidden_dim);
      for (double w : units) out += "," + format_double(w);
      out += '\n';
    }
  }
  write_file(path, out);
}

WeightMap read_weight_map_csv(const std::filesystem::path& path, std::size_t class_index) {
  std::vector<std::string> header;
  const auto rows = parse_csv_numbers(path, header);
  if (header.size() < 3 || header[0] != "timestep") {
    throw std::runtime_error(path.string() + ": not a weight-map CSV");
  }
  const bool single = header[1] == "mean_weight";
  const std::size_t lead = single ? 2 : 4;
  if (header.size() <= lead) throw std::runtime_error(path.string() + ": no unit columns");
  WeightMap map;
  map.class_index = class_index;
  map.hidden_dim = header.size() - lead;
  std::size_t horizon = 0;
  for (const auto& r : rows) horizon = std::max(horizon, static_cast<std::size_t>(r[0]) + 1);
  if (horizon == 0 || rows.size() % horizon != 0) {
    throw std::runtime_error(path.string() + ": rows do not tile the timesteps");
  }
  map.horizon = horizon;
  map.blocks_per_step = rows.size() / horizon;
  map.block_means = Vector(rows.size());
  map.per_unit = Matrix(horizon, map.blocks_per_step * map.hidden_dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t t = i / map.blocks_per_step;
    const std::size_t b = i % map.blocks_per_step;
    if (static_cast<std::size_t>(rows[i][0]) != t) {
      throw std::runtime_error(path.string() + ": rows are not in timestep order");
    }
    map.block_means[i] = rows[i][lead - 1];
    for (std::size_t u = 0; u < map.hidden_dim; ++u) {
      map.per_unit(t, b * map.hidden_dim + u) = rows[i][lead + u];
    }
  }
  return map;
}

void write_similarity_csv(const Matrix& similarity, const std::filesystem::path& path) {
  std::string out = "class";
  for (std::size_t j = 0; j < similarity.cols(); ++j) out += ",class_" + std::to_string(j);
  out += '\n';
  for (std::size_t i = 0; i < similarity.rows(); ++i) {
    out += std::to_string(i);
    for (std::size_t j = 0; j < similarity.cols(); ++j) out += "," + format_double(similarity(i, j));
    out += '\n';
  }
  write_file(path, out);
}

Matrix read_similarity_csv(const std::filesystem::path& path) {
  std::vector<std::string> header;
  const auto rows = parse_csv_numbers(path, header);
  if (header.empty() || header[0] != "class") {
    throw std::runtime_error(path.string() + ": not a similarity CSV");
  }
  Matrix m(rows.size(), header.size() - 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 1; j < header.size(); ++j) m(i, j - 1) = rows[i][j];
  }
  return m;
}

std::string counterfactuals_to_json(const std::vector<CounterfactualResult>& rows,
                                    const std::vector<ClassTargetedResult>& targeted) {
  json out;
  out["rows"] = json::array();
  for (const auto& r : rows) {
    json row = report_json(r.report);
    row["class"] = r.class_index;
    row["k"] = r.k;
    row["mode"] = to_string(r.mode);
    row["ablation"] = to_string(r.ablation);
    row["zeroed_steps"] = r.zeroed_steps;
    out["rows"].push_back(std::move(row));
  }
  if (!targeted.empty()) {
    out["class_targeted"] = json::array();
    for (const auto& r : targeted) {
      out["class_targeted"].push_back({{"k", r.k},
                                       {"mode", to_string(r.mode)},
                                       {"zeroed_steps", r.zeroed_steps},
                                       {"per_class_accuracy", r.per_class_accuracy},
                                       {"overall_accuracy", r.overall_accuracy}});
    }
  }
  return out.dump(2) + "\n";
}

ReportFiles export_report(const std::vector<WeightMap>& maps, const EncoderConfig& cfg,
                          const std::optional<Matrix>& similarity,
                          const std::vector<CounterfactualResult>& counterfactuals,
                          const std::filesystem::path& directory,
                          const std::vector<ClassTargetedResult>& targeted) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) {
    throw std::runtime_error("cannot create " + directory.string() + ": " + ec.message());
  }
  ReportFiles files;
  json manifest;
  manifest["weight_maps"] = json::array();
  for (const auto& m : maps) {
    const std::string name = "class_" + std::to_string(m.class_index) + "_weights.csv";
    write_weight_map_csv(m, cfg, directory / name);
    files.weight_maps.push_back(directory / name);
    manifest["weight_maps"].push_back({{"class", m.class_index}, {"file", name}});
  }
  if (similarity) {
    write_similarity_csv(*similarity, directory / "similarity.csv");
    files.similarity = directory / "similarity.csv";
    manifest["similarity"] = "similarity.csv";
  }
  if (!counterfactuals.empty() || !targeted.empty()) {
    write_file(directory / "counterfactuals.json",
               counterfactuals_to_json(counterfactuals, targeted));
    files.counterfactuals = directory / "counterfactuals.json";
    manifest["counterfactuals"] = "counterfactuals.json";
  }
  files.manifest = directory / "manifest.json";
  write_file(files.manifest, manifest.dump(2) + "\n");
  return files;
}

}  // namespace nv
