// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lfm/fmtrain.hpp"
#include "lfm/netcore.hpp"
#include "lfm/odeint.hpp"

namespace lfm {

enum class DatasetKind : std::uint8_t { rose, checkerboard, mixture, gaussian, csv };

struct DatasetConfig {
  DatasetKind kind = DatasetKind::rose;
  int expected_dim = 2;  // checked against the loaded data
  long n_train = 20000;  // synthetic data only
  long n_test = 5000;    // synthetic data only
  int rose_petals = 4;
  double rose_noise = 0.02;
  int mixture_components = 8;
  double mixture_radius = 1.0;
  double mixture_sigma = 0.1;
  std::vector<double> gaussian_mean{2.0, 0.0};
  std::string csv_path;
  bool csv_header = false;
  double test_fraction = 0.1;
};

/// Everything needed to reproduce one training run.
struct RunConfig {
  std::string preset;  // name the config was derived from, empty if none
  DatasetConfig dataset;
  double schedule_c = 0.1;
  double schedule_rho = 1.25;
  int n_blocks = 4;
  int hidden_width = 64;
  int hidden_layers = 3;
  Activation activation = Activation::softplus;
  TimeFeatures time_features;
  BlockTrainConfig block;  // block.seed is overwritten from `seed`
  IntegratorConfig integrator;
  std::uint64_t seed = 0;

  MlpSpec mlp_spec() const;
  BlockTrainConfig block_config() const;

  /// Throws ValidationError naming the offending key.
  void validate() const;
};

/// Settings of the `distill` command.
struct DistillConfig {
  long chain_samples = 20000;
  int hidden_width = 128;
  int hidden_layers = 3;
  Activation activation = Activation::softplus;
  BlockTrainConfig block;
  std::uint64_t seed = 0;

  MlpSpec mlp_spec(int dim) const;
  void validate() const;
};

/// Named hyperparameter sets. Full-scale presets reproduce the published
/// two-dimensional and tabular settings; "-mini" variants cut budgets for
/// desktop runs.
RunConfig preset(std::string_view name);
std::vector<std::string> preset_names();

/// Flat `key = value` text, '#' starts a comment. A `preset` key, when present,
/// is applied first and the remaining keys override it.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Distill keys; training keys the distill command does not use are ignored.
DistillConfig parse_distill_config(std::string_view text);
DistillConfig load_distill_config(const std::filesystem::path& path);

/// Fully resolved `key = value` rendering that parse_run_config reads back unchanged.
std::string to_text(const RunConfig& cfg);
std::string to_text(const DistillConfig& cfg);

std::string_view to_string(DatasetKind kind);

}  // namespace lfm
