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

#include <cmath>
#include <filesystem>
#include <limits>
#include <utility>

#include <gtest/gtest.h>
#include <json.hpp>

#include "neuroview/text_io.h"
#include "support/oracles.h"

namespace nv {
namespace {

namespace fs = std::filesystem;
using testing::random_model;

template <typename Fn>
std::string error_of(Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "<no error>";
}

// Python: base64.b64encode(struct.pack('<Nd', ...)).
TEST(Base64Test, KnownVectors) {
  EXPECT_EQ(encode_doubles(std::vector<double>{}), "");
  EXPECT_EQ(encode_doubles(std::vector<double>{1.0}), "AAAAAAAA8D8=");
  EXPECT_EQ(encode_doubles(std::vector<double>{1.0, -2.5}), "AAAAAAAA8D8AAAAAAAAEwA==");
  EXPECT_EQ(encode_doubles(std::vector<double>{0.1, 1e300, -0.0}),
            "mpmZmZmZuT+cdQCIPOQ3fgAAAAAAAACA");
  EXPECT_EQ(decode_doubles("AAAAAAAA8D8AAAAAAAAEwA=="), (std::vector<double>{1.0, -2.5}));
}

TEST(Base64Test, RoundTripIsBitExact) {
  Rng rng(3);
  std::vector<double> v{-0.0, std::numeric_limits<double>::denorm_min(),
                        std::numeric_limits<double>::max(), std::nan("")};
  for (int i = 0; i < 200; ++i) v.push_back(rng.normal() * std::pow(10.0, rng.uniform(-300, 300)));
  const auto back = decode_doubles(encode_doubles(v));
  ASSERT_EQ(back.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(back[i]), std::bit_cast<std::uint64_t>(v[i]));
  }
}

TEST(Base64Test, RejectsMalformed) {
  EXPECT_THROW(decode_doubles("AAAA"), CheckpointError);           // 3 bytes
  EXPECT_THROW(decode_doubles("AAAAAAAA8D8"), CheckpointError);    // length
  EXPECT_THROW(decode_doubles("AAAAAAAA8D8*"), CheckpointError);   // alphabet
  EXPECT_THROW(decode_doubles("AA=AAAAA8D8="), CheckpointError);   // padding
}

Checkpoint sample_checkpoint(bool with_optimizer) {
  EncoderConfig e;
  e.cell = CellKind::kLstm;
  e.input_dim = 2;
  e.hidden_dim = 3;
  e.horizon = 5;
  e.layers = 2;
  e.bidirectional = true;
  Checkpoint ck;
  ck.model = random_model(e, HeadKind::kNeuroView, 3, 17);
  ck.config.encoder = e;
  ck.config.dataset = "Synth";
  ck.config.train.seed = 17;
  ck.seed = 17;
  ck.metrics = {{"test_accuracy", 0.875}, {"train_accuracy", 1.0}};
  ck.label_values = {-1.0, 0.5, 2.0};
  if (with_optimizer) {
    ck.optimizer = AdamState::for_params(std::as_const(ck.model).views());
    Rng rng(5);
    for (auto& block : ck.optimizer->first_moment) {
      for (double& x : block) x = rng.normal();
    }
    for (auto& block : ck.optimizer->second_moment) {
      for (double& x : block) x = rng.uniform01();
    }
    ck.optimizer->step = 42;
  }
  return ck;
}

TEST(CheckpointTest, JsonRoundTripIsByteIdentical) {
  for (bool opt : {false, true}) {
    const Checkpoint ck = sample_checkpoint(opt);
    const std::string a = checkpoint_to_json(ck);
    const Checkpoint back = checkpoint_from_json(a);
    EXPECT_EQ(back, ck);
    EXPECT_EQ(checkpoint_to_json(back), a);
  }
}

TEST(CheckpointTest, FileRoundTripPreservesPredictions) {
  const fs::path dir = fs::temp_directory_path() / "nv_checkpoint_test_file";
  fs::remove_all(dir);
  const Checkpoint ck = sample_checkpoint(true);
  save_checkpoint(ck, dir / "sub" / "ck.json");
  const Checkpoint back = load_checkpoint(dir / "sub" / "ck.json");
  save_checkpoint(back, dir / "again.json");
  EXPECT_EQ(read_file(dir / "sub" / "ck.json"), read_file(dir / "again.json"));
  Rng rng(9);
  for (int i = 0; i < 5; ++i) {
    const Matrix x = testing::random_matrix(5, 2, rng);
    EXPECT_EQ(forward(back.model, x).logits, forward(ck.model, x).logits);
  }
  EXPECT_THROW(load_checkpoint(dir / "missing.json"), CheckpointError);
  fs::remove_all(dir);
}

TEST(CheckpointTest, RejectsBadContent) {
  const std::string good = checkpoint_to_json(sample_checkpoint(true));
  using nlohmann::json;
  auto mutate = [&](auto&& fn) {
    json j = json::parse(good);
    fn(j);
    return error_of([&] { checkpoint_from_json(j.dump()); });
  };
  EXPECT_NE(mutate([](json& j) { j["version"] = 2; }).find("version 2"), std::string::npos);
  EXPECT_NE(mutate([](json& j) { j["format"] = "other"; }).find("not a neuroview checkpoint"),
            std::string::npos);
  EXPECT_NE(mutate([](json& j) { j.erase("head"); }).find("malformed"), std::string::npos);
  EXPECT_NE(mutate([](json& j) { j["cells"][0]["blocks"][0]["name"] = "Q"; }).find("expected block"),
            std::string::npos);
  EXPECT_NE(mutate([](json& j) { j["head"]["weights"]["cols"] = 7; }).find("head V"),
            std::string::npos);
  EXPECT_NE(mutate([](json& j) { j["optimizer"]["first_moment"].erase(0); }).find("optimizer"),
            std::string::npos);
  EXPECT_NE(mutate([](json& j) { j["config"]["colour"] = "red"; }).find("colour"),
            std::string::npos);
  EXPECT_THROW(checkpoint_from_json("{not json"), CheckpointError);
  EXPECT_THROW(checkpoint_from_json(good.substr(0, good.size() / 2)), CheckpointError);
}

TEST(RunConfigTest, FormatWritesEveryKeySorted) {
  const std::string text = format_run_config(RunConfig{});
  std::vector<std::string> keys;
  for (std::string_view line : split(text, '\n')) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    keys.emplace_back(trim(line.substr(0, line.find('='))));
  }
  EXPECT_EQ(keys.size(), RunConfig{}.to_pairs().size());
  EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
  EXPECT_NE(text.find("learning_rate = 0.001"), std::string::npos) << text;
  EXPECT_NE(text.find("epochs = 1000"), std::string::npos);
  EXPECT_NE(text.find("head = nv"), std::string::npos) << text;
}

TEST(RunConfigTest, ParseFormatRoundTrip) {
  RunConfig c;
  c.dataset = "Chinatown";
  c.encoder.cell = CellKind::kLstm;
  c.encoder.hidden_dim = 17;
  c.encoder.layers = 2;
  c.encoder.bidirectional = true;
  c.head = HeadKind::kAveragePool;
  c.mean_pool = true;
  c.init = InitKind::kOrthogonal;
  c.train.adam.learning_rate = 0.0031;
  c.train.epochs = 12;
  c.train.batch_size = 8;
  c.train.seed = 123456789012345ULL;
  c.train.clip_norm = 2.5;
  c.znorm = true;
  c.output_dir = "out dir";
  const std::string text = format_run_config(c);
  EXPECT_EQ(parse_run_config(text), c);
  EXPECT_EQ(format_run_config(parse_run_config(text)), text);
  EXPECT_EQ(parse_run_config(""), RunConfig{});
}

TEST(RunConfigTest, CommentsAndWhitespace) {
  const RunConfig c = parse_run_config(
      "# leading comment\n\n  hidden_dim=8   # trailing\n\tcell =  lstm\r\nepochs = 3\n");
  EXPECT_EQ(c.encoder.hidden_dim, 8u);
  EXPECT_EQ(c.encoder.cell, CellKind::kLstm);
  EXPECT_EQ(c.train.epochs, 3u);
}

TEST(RunConfigTest, ErrorsNameTheField) {
  auto err = [](std::string_view text) { return error_of([&] { parse_run_config(text); }); };
  EXPECT_NE(err("epochs = 1\ncolour = red\n").find("line 2: unknown config key 'colour'"),
            std::string::npos)
      << err("epochs = 1\ncolour = red\n");
  EXPECT_NE(err("hidden_dim = many").find("hidden_dim"), std::string::npos);
  EXPECT_NE(err("hidden_dim = 0").find("hidden_dim"), std::string::npos);
  EXPECT_NE(err("learning_rate = -1").find("learning_rate"), std::string::npos);
  EXPECT_NE(err("bidirectional = maybe").find("expected true or false"), std::string::npos);
  EXPECT_NE(err("cell = transformer").find("cell"), std::string::npos);
  EXPECT_NE(err("just words").find("expected 'key = value'"), std::string::npos);
  EXPECT_THROW(parse_run_config("seed = -1"), ConfigError);
}

TEST(RunConfigTest, FileRoundTrip) {
  const fs::path p = fs::temp_directory_path() / "nv_checkpoint_test_config.txt";
  RunConfig c;
  c.train.epochs = 7;
  save_run_config(c, p);
  EXPECT_EQ(load_run_config(p), c);
  write_file(p, "epochs = x\n");
  EXPECT_NE(error_of([&] { load_run_config(p); }).find(p.string()), std::string::npos);
  fs::remove(p);
  EXPECT_THROW(load_run_config(p), ConfigError);
}

}  // namespace
}  // namespace nv
