// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "lfm/config.hpp"
#include "lfm/error.hpp"

namespace {

std::string without_comments(const std::string& text) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = text.find('\n', pos);
    const std::string line = text.substr(pos, end - pos);
    if (line.empty() || line[0] != '#') out += line + '\n';
    pos = end == std::string::npos ? text.size() : end + 1;
  }
  return out;
}

std::string error_of(const std::string& text) {
  try {
    lfm::parse_run_config(text);
  } catch (const lfm::ValidationError& e) {
    return e.what();
  }
  return "";
}

TEST(ConfigTest, RosePresetSchedule) {
  const auto c = lfm::preset("rose");
  EXPECT_EQ(c.schedule_c, 0.025);
  EXPECT_EQ(c.schedule_rho, 1.25);
  EXPECT_EQ(c.n_blocks, 9);
  EXPECT_EQ(c.block.batch_size, 10000);
  EXPECT_EQ(c.hidden_width, 256);
  EXPECT_EQ(c.hidden_layers, 3);
  EXPECT_EQ(c.activation, lfm::Activation::softplus);
  EXPECT_EQ(c.block.adam.lr, 2e-4);
  EXPECT_EQ(c.block.adam.decay_factor, 0.99);
  EXPECT_EQ(c.block.adam.decay_every, 1000);
  EXPECT_EQ(c.block.time_sampler.alpha, 1.0);
  EXPECT_EQ(c.block.time_sampler.beta, 1.0);
  // 50K batches in total, split evenly over the blocks.
  EXPECT_EQ(c.block.n_batches, 50000 / 9);
}

TEST(ConfigTest, PowerPreset) {
  const auto c = lfm::preset("power");
  EXPECT_EQ(c.n_blocks, 4);
  EXPECT_EQ(c.schedule_c, 0.15);
  EXPECT_EQ(c.schedule_rho, 1.3);
  EXPECT_EQ(c.dataset.expected_dim, 6);
  EXPECT_EQ(c.dataset.kind, lfm::DatasetKind::csv);
}

TEST(ConfigTest, UnknownPresetListsNames) {
  try {
    lfm::preset("swissroll");
    FAIL();
  } catch (const lfm::ValidationError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("swissroll"), std::string::npos);
    for (const auto& n : lfm::preset_names()) EXPECT_NE(what.find(n), std::string::npos) << n;
  }
}

TEST(ConfigTest, EveryPresetValidates) {
  for (const auto& name : lfm::preset_names()) {
    auto c = lfm::preset(name);
    if (c.dataset.kind == lfm::DatasetKind::csv) c.dataset.csv_path = "data.csv";
    EXPECT_NO_THROW(c.validate()) << name;
    EXPECT_EQ(c.mlp_spec().input_dim, c.dataset.expected_dim) << name;
    EXPECT_EQ(c.preset, name);
  }
}

TEST(ConfigTest, MiniPresetsAreSmaller) {
  for (const char* base : {"rose", "checkerboard"}) {
    const auto full = lfm::preset(base);
    const auto mini = lfm::preset(std::string(base) + "-mini");
    EXPECT_LT(mini.block.batch_size * mini.block.n_batches * mini.n_blocks,
              full.block.batch_size * full.block.n_batches * full.n_blocks / 10);
    EXPECT_EQ(mini.n_blocks, 4);
  }
}

TEST(ConfigTest, ParseOverridesPreset) {
  const auto c = lfm::parse_run_config(
      "# comment\n"
      "hidden_width = 32   # trailing comment\n"
      "preset = rose-mini\n"
      "\n"
      "seed = 18446744073709551615\n"
      "time_features = sinusoidal:4\n"
      "interpolant = ot\n"
      "integrator = euler\n");
  EXPECT_EQ(c.preset, "rose-mini");
  EXPECT_EQ(c.hidden_width, 32);
  EXPECT_EQ(c.n_blocks, lfm::preset("rose-mini").n_blocks);
  EXPECT_EQ(c.seed, 18446744073709551615ull);
  EXPECT_EQ(c.time_features.kind, lfm::TimeEncoding::sinusoidal);
  EXPECT_EQ(c.time_features.k, 4);
  EXPECT_EQ(c.block.interpolant, lfm::Interpolant::ot);
  EXPECT_EQ(c.integrator.scheme, lfm::Scheme::euler);
}

TEST(ConfigTest, TextRoundTrip) {
  for (const auto& name : lfm::preset_names()) {
    auto c = lfm::preset(name);
    if (c.dataset.kind == lfm::DatasetKind::csv) c.dataset.csv_path = "/data/x.csv";
    c.seed = 12345;
    c.block.adam.lr = 0.1 + 0.2;  // not exactly representable in short decimal
    const std::string text = lfm::to_text(c);
    const auto back = lfm::parse_run_config(text);
    EXPECT_EQ(without_comments(lfm::to_text(back)), without_comments(text)) << name;
    EXPECT_EQ(back.block.adam.lr, c.block.adam.lr);
    EXPECT_EQ(back.mlp_spec(), c.mlp_spec());
  }
}

TEST(ConfigTest, ErrorsNameTheKey) {
  EXPECT_NE(error_of("hidden_width = wide\n").find("hidden_width"), std::string::npos);
  EXPECT_NE(error_of("hidden_width = 0\n").find("hidden_width"), std::string::npos);
  EXPECT_NE(error_of("learning_rate = -1\n").find("learning_rate"), std::string::npos);
  EXPECT_NE(error_of("colour = red\n").find("colour"), std::string::npos);
  EXPECT_NE(error_of("a\n").find("line 1"), std::string::npos);
  EXPECT_NE(error_of("\n\nactivation = swish\n").find("line 3"), std::string::npos);
  EXPECT_NE(error_of("preset = nope\n").find("known presets"), std::string::npos);
  EXPECT_NE(error_of("dataset = csv\n").find("data_path"), std::string::npos);
  EXPECT_NE(error_of("dataset = rose\ndataset_dim = 3\n").find("dataset_dim"), std::string::npos);
  EXPECT_NE(error_of("dataset = gaussian\ndataset_dim = 3\ngaussian_mean = 1,2\n").find("gaussian_mean"),
            std::string::npos);
  EXPECT_NE(error_of("time_features = sinusoidal:x\n").find("time_features"), std::string::npos);
}

TEST(ConfigTest, BlockConfigDerivesSeed) {
  auto c = lfm::preset("rose-mini");
  c.seed = 4;
  EXPECT_EQ(c.block_config().seed, lfm::derive_seed(4, lfm::streams::training));
  c.seed = 5;
  EXPECT_NE(c.block_config().seed, lfm::derive_seed(4, lfm::streams::training));
}

TEST(ConfigTest, DistillConfig) {
  const auto c = lfm::parse_distill_config(
      "chain_samples = 500\nhidden_width = 16\nn_blocks = 9\nlearning_rate = 0.01\nseed = 3\n");
  EXPECT_EQ(c.chain_samples, 500);
  EXPECT_EQ(c.hidden_width, 16);
  EXPECT_EQ(c.block.adam.lr, 0.01);
  EXPECT_EQ(c.mlp_spec(3).time.kind, lfm::TimeEncoding::none);
  EXPECT_EQ(c.mlp_spec(3).input_dim, 3);
  EXPECT_EQ(lfm::parse_distill_config(lfm::to_text(c)).chain_samples, 500);
  EXPECT_EQ(lfm::to_text(lfm::parse_distill_config(lfm::to_text(c))), lfm::to_text(c));
  EXPECT_THROW(lfm::parse_distill_config("colour = red\n"), lfm::ValidationError);
  EXPECT_THROW(lfm::parse_distill_config("chain_samples = 0\n"), lfm::ValidationError);
}

TEST(ConfigTest, LoadFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "lfm_config_test.cfg";
  {
    std::ofstream out(path);
    out << "preset = mixture-mini\nseed = 9\n";
  }
  const auto c = lfm::load_run_config(path);
  EXPECT_EQ(c.dataset.kind, lfm::DatasetKind::mixture);
  EXPECT_EQ(c.seed, 9u);
  std::filesystem::remove(path);
  try {
    lfm::load_run_config(path);
    FAIL();
  } catch (const lfm::ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find(path.string()), std::string::npos);
  }
}

}  // namespace
