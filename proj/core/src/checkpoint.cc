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

#include "neuroview/checkpoint.h"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>

#include "json.hpp"
#include "neuroview/text_io.h"

namespace nv {
namespace {

using json = nlohmann::json;

constexpr std::string_view kFormatName = "neuroview-checkpoint";
constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::uint64_t parse_uint(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + std::string(key) +
                      "': expected a non-negative integer, got '" + std::string(value) + "'");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  const auto v = parse_double(value);
  if (!v || !std::isfinite(*v)) {
    throw ConfigError("config key '" + std::string(key) + "': expected a number, got '" +
                      std::string(value) + "'");
  }
  return *v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config key '" + std::string(key) + "': expected true or false, got '" +
                    std::string(value) + "'");
}

template <typename Parse>
auto parse_enum(std::string_view key, std::string_view value, Parse parse) {
  try {
    return parse(value);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config key '" + std::string(key) + "': " + e.what());
  }
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

json matrix_json(const Matrix& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", encode_doubles(m.span())}};
}

Matrix matrix_from_json(const json& j, std::string_view what) {
  const std::size_t rows = j.at("rows").get<std::size_t>();
  const std::size_t cols = j.at("cols").get<std::size_t>();
  const std::vector<double> data = decode_doubles(j.at("data").get<std::string>());
  if (data.size() != rows * cols) {
    throw CheckpointError("checkpoint: " + std::string(what) + " holds " +
                          std::to_string(data.size()) + " values for a " +
                          std::to_string(rows) + "x" + std::to_string(cols) + " block");
  }
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

}  // namespace

RunConfig::RunConfig() {
  encoder.input_dim = 0;
  encoder.horizon = 0;
}

std::map<std::string, std::string> RunConfig::to_pairs() const {
  return {
      {"dataset", dataset},
      {"train_path", train_path},
      {"test_path", test_path},
      {"cell", std::string(to_string(encoder.cell))},
      {"input_dim", std::to_string(encoder.input_dim)},
      {"hidden_dim", std::to_string(encoder.hidden_dim)},
      {"layers", std::to_string(encoder.layers)},
      {"bidirectional", bool_text(encoder.bidirectional)},
      {"horizon", std::to_string(encoder.horizon)},
      {"head", std::string(to_string(head))},
      {"mean_pool", bool_text(mean_pool)},
      {"init", std::string(to_string(init))},
      {"learning_rate", format_double(train.adam.learning_rate)},
      {"beta1", format_double(train.adam.beta1)},
      {"beta2", format_double(train.adam.beta2)},
      {"epsilon", format_double(train.adam.epsilon)},
      {"epochs", std::to_string(train.epochs)},
      {"batch_size", std::to_string(train.batch_size)},
      {"seed", std::to_string(train.seed)},
      {"clip_norm", format_double(train.clip_norm)},
      {"znorm", bool_text(znorm)},
      {"output_dir", output_dir},
  };
}

void RunConfig::set(std::string_view key, std::string_view value) {
  if (key == "dataset") {
    dataset = value;
  } else if (key == "train_path") {
    train_path = value;
  } else if (key == "test_path") {
    test_path = value;
  } else if (key == "cell") {
    encoder.cell = parse_enum(key, value, parse_cell_kind);
  } else if (key == "input_dim") {
    encoder.input_dim = parse_uint(key, value);
  } else if (key == "hidden_dim") {
    encoder.hidden_dim = parse_uint(key, value);
    if (encoder.hidden_dim == 0) throw ConfigError("config key 'hidden_dim': must be >= 1");
  } else if (key == "layers") {
    encoder.layers = parse_uint(key, value);
    if (encoder.layers == 0) throw ConfigError("config key 'layers': must be >= 1");
  } else if (key == "bidirectional") {
    encoder.bidirectional = parse_bool(key, value);
  } else if (key == "horizon") {
    encoder.horizon = parse_uint(key, value);
  } else if (key == "head") {
    head = parse_enum(key, value, parse_head_kind);
  } else if (key == "mean_pool") {
    mean_pool = parse_bool(key, value);
  } else if (key == "init") {
    init = parse_enum(key, value, parse_init_kind);
  } else if (key == "learning_rate") {
    train.adam.learning_rate = parse_real(key, value);
    if (!(train.adam.learning_rate > 0.0)) {
      throw ConfigError("config key 'learning_rate': must be > 0");
    }
  } else if (key == "beta1") {
    train.adam.beta1 = parse_real(key, value);
  } else if (key == "beta2") {
    train.adam.beta2 = parse_real(key, value);
  } else if (key == "epsilon") {
    train.adam.epsilon = parse_real(key, value);
  } else if (key == "epochs") {
    train.epochs = parse_uint(key, value);
  } else if (key == "batch_size") {
    train.batch_size = parse_uint(key, value);
  } else if (key == "seed") {
    train.seed = parse_uint(key, value);
  } else if (key == "clip_norm") {
    train.clip_norm = parse_real(key, value);
  } else if (key == "znorm") {
    znorm = parse_bool(key, value);
  } else if (key == "output_dir") {
    output_dir = value;
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

std::string format_run_config(const RunConfig& config) {
  std::string out = "# neuroview run config\n";
  for (const auto& [key, value] : config.to_pairs()) out += key + " = " + value + "\n";
  return out;
}

RunConfig parse_run_config(std::string_view text) {
  RunConfig config;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + std::string(line) + "'");
    }
    try {
      config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  config.train.validate();
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  try {
    return parse_run_config(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void save_run_config(const RunConfig& config, const std::filesystem::path& path) {
  write_file(path, format_run_config(config));
}

std::string encode_doubles(std::span<const double> values) {
  std::string bytes;
  bytes.reserve(values.size() * 8);
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
  }
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t chunk = (static_cast<std::uint8_t>(bytes[i]) << 16) |
                                (static_cast<std::uint8_t>(bytes[i + 1]) << 8) |
                                static_cast<std::uint8_t>(bytes[i + 2]);
    out += kAlphabet[(chunk >> 18) & 63];
    out += kAlphabet[(chunk >> 12) & 63];
    out += kAlphabet[(chunk >> 6) & 63];
    out += kAlphabet[chunk & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest) {
    std::uint32_t chunk = static_cast<std::uint8_t>(bytes[i]) << 16;
    if (rest == 2) chunk |= static_cast<std::uint8_t>(bytes[i + 1]) << 8;
    out += kAlphabet[(chunk >> 18) & 63];
    out += kAlphabet[(chunk >> 12) & 63];
    out += rest == 2 ? kAlphabet[(chunk >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::vector<double> decode_doubles(std::string_view text) {
  std::array<int, 256> lookup;
  lookup.fill(-1);
  for (std::size_t i = 0; i < kAlphabet.size(); ++i) {
    lookup[static_cast<unsigned char>(kAlphabet[i])] = static_cast<int>(i);
  }
  if (text.size() % 4 != 0) throw CheckpointError("base64 payload length is not a multiple of 4");
  std::string bytes;
  bytes.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::uint32_t chunk = 0;
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      int v = 0;
      if (c == '=') {
        if (i + 4 != text.size() || k < 2) throw CheckpointError("misplaced base64 padding");
        ++pad;
      } else {
        if (pad) throw CheckpointError("misplaced base64 padding");
        v = lookup[static_cast<unsigned char>(c)];
        if (v < 0) throw CheckpointError("invalid base64 character");
      }
      chunk = (chunk << 6) | static_cast<std::uint32_t>(v);
    }
    bytes.push_back(static_cast<char>((chunk >> 16) & 0xff));
    if (pad < 2) bytes.push_back(static_cast<char>((chunk >> 8) & 0xff));
    if (pad < 1) bytes.push_back(static_cast<char>(chunk & 0xff));
  }
  if (bytes.size() % 8 != 0) throw CheckpointError("base64 payload is not a whole number of doubles");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(bytes[i * 8 + b])) << (8 * b);
    }
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

std::string checkpoint_to_json(const Checkpoint& ck) {
  const Model& model = ck.model;
  json j;
  j["format"] = kFormatName;
  j["version"] = kCheckpointVersion;
  j["config"] = ck.config.to_pairs();
  const EncoderConfig& enc = model.encoder;
  j["encoder"] = {{"cell", to_string(enc.cell)},
                  {"input_dim", enc.input_dim},
                  {"hidden_dim", enc.hidden_dim},
                  {"layers", enc.layers},
                  {"bidirectional", enc.bidirectional},
                  {"horizon", enc.horizon}};
  j["cells"] = json::array();
  for (const auto& cell : model.cells) {
    json blocks = json::array();
    for (const auto& v : cell.views()) {
      blocks.push_back(
          {{"name", v.name}, {"rows", v.rows}, {"cols", v.cols}, {"data", encode_doubles(v.values)}});
    }
    j["cells"].push_back({{"kind", to_string(cell.kind)},
                          {"input_dim", cell.input_dim},
                          {"hidden_dim", cell.hidden_dim},
                          {"blocks", std::move(blocks)}});
  }
  j["head"] = {{"kind", to_string(model.head.kind)},
               {"mean_pool", model.head.mean_pool},
               {"weights", matrix_json(model.head.weights)}};
  if (ck.optimizer) {
    json first = json::array();
    json second = json::array();
    for (const auto& m : ck.optimizer->first_moment) first.push_back(encode_doubles(m));
    for (const auto& v : ck.optimizer->second_moment) second.push_back(encode_doubles(v));
    j["optimizer"] = {{"step", ck.optimizer->step},
                      {"first_moment", std::move(first)},
                      {"second_moment", std::move(second)}};
  } else {
    j["optimizer"] = nullptr;
  }
  j["metrics"] = ck.metrics;
  j["seed"] = ck.seed;
  j["label_values"] = encode_doubles(ck.label_values);
  return j.dump(2) + "\n";
}

Checkpoint checkpoint_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format", std::string()) != kFormatName) {
      throw CheckpointError("not a neuroview checkpoint");
    }
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw CheckpointError("checkpoint format version " + std::to_string(version) +
                            " is not supported (expected " +
                            std::to_string(kCheckpointVersion) + ")");
    }
    Checkpoint ck;
    for (const auto& [key, value] : j.at("config").items()) {
      ck.config.set(key, value.get<std::string>());
    }
    const json& e = j.at("encoder");
    Model& model = ck.model;
    model.encoder.cell = parse_cell_kind(e.at("cell").get<std::string>());
    model.encoder.input_dim = e.at("input_dim").get<std::size_t>();
    model.encoder.hidden_dim = e.at("hidden_dim").get<std::size_t>();
    model.encoder.layers = e.at("layers").get<std::size_t>();
    model.encoder.bidirectional = e.at("bidirectional").get<bool>();
    model.encoder.horizon = e.at("horizon").get<std::size_t>();

    for (const auto& c : j.at("cells")) {
      CellParams p = CellParams::zeros(parse_cell_kind(c.at("kind").get<std::string>()),
                                       c.at("input_dim").get<std::size_t>(),
                                       c.at("hidden_dim").get<std::size_t>());
      auto views = p.views();
      const json& blocks = c.at("blocks");
      if (blocks.size() != views.size()) {
        throw CheckpointError("checkpoint: cell has " + std::to_string(blocks.size()) +
                              " blocks, expected " + std::to_string(views.size()));
      }
      for (std::size_t b = 0; b < views.size(); ++b) {
        const json& blk = blocks[b];
        if (blk.at("name").get<std::string>() != views[b].name) {
          throw CheckpointError("checkpoint: expected block " + views[b].name + ", found " +
                                blk.at("name").get<std::string>());
        }
        const auto data = decode_doubles(blk.at("data").get<std::string>());
        if (data.size() != views[b].values.size() ||
            blk.at("rows").get<std::size_t>() != views[b].rows ||
            blk.at("cols").get<std::size_t>() != views[b].cols) {
          throw CheckpointError("checkpoint: block " + views[b].name + " has the wrong shape");
        }
        std::copy(data.begin(), data.end(), views[b].values.begin());
      }
      model.cells.push_back(std::move(p));
    }
    const json& h = j.at("head");
    model.head.kind = parse_head_kind(h.at("kind").get<std::string>());
    model.head.mean_pool = h.at("mean_pool").get<bool>();
    model.head.weights = matrix_from_json(h.at("weights"), "head V");
    model.validate();

    if (!j.at("optimizer").is_null()) {
      const json& o = j.at("optimizer");
      AdamState s;
      s.step = o.at("step").get<std::uint64_t>();
      for (const auto& m : o.at("first_moment")) s.first_moment.push_back(decode_doubles(m.get<std::string>()));
      for (const auto& v : o.at("second_moment")) s.second_moment.push_back(decode_doubles(v.get<std::string>()));
      const auto views = std::as_const(model).views();
      if (s.first_moment.size() != views.size() || s.second_moment.size() != views.size()) {
        throw CheckpointError("checkpoint: optimizer state does not match the model");
      }
      for (std::size_t b = 0; b < views.size(); ++b) {
        if (s.first_moment[b].size() != views[b].values.size() ||
            s.second_moment[b].size() != views[b].values.size()) {
          throw CheckpointError("checkpoint: optimizer block " + views[b].name +
                                " has the wrong size");
        }
      }
      ck.optimizer = std::move(s);
    }
    ck.metrics = j.at("metrics").get<std::map<std::string, double>>();
    ck.seed = j.at("seed").get<std::uint64_t>();
    ck.label_values = decode_doubles(j.at("label_values").get<std::string>());
    return ck;
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("malformed checkpoint config: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw CheckpointError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  write_file(path, checkpoint_to_json(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::runtime_error& e) {
    throw CheckpointError(e.what());
  }
  return checkpoint_from_json(text);
}

}  // namespace nv
