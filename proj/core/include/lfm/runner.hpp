// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lfm/checkpoint.hpp"
#include "lfm/config.hpp"
#include "lfm/datasets.hpp"
#include "lfm/metrics.hpp"
#include "lfm/pipeline.hpp"

namespace lfm {

struct DataSplit {
  Samples train;
  Samples test;
};

/// Materializes the configured dataset. Synthetic sets draw train and test from
/// independent streams of the global seed; CSV sets are split and standardized.
DataSplit load_dataset(const RunConfig& cfg);

struct TrainOutputs {
  std::filesystem::path checkpoint;  // model.lfm
  std::filesystem::path loss_history;
  std::filesystem::path manifest;
  std::filesystem::path test_data;
  double mean_test_nll = 0.0;
};

/// Trains an LFM model and writes model.lfm, loss_history.csv (block,batch,loss),
/// manifest.txt (fully resolved config), and test.csv (held-out data in model space).
TrainOutputs run_train(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// Writes `n` generated samples, one per row. Works for both checkpoint kinds.
void run_generate(const std::filesystem::path& model_path, long n, std::uint64_t seed,
                  const std::filesystem::path& out_csv, const IntegratorConfig& integrator = {});

/// Writes one NLL (nats) per input row, then a final `mean,<value>` line.
/// Returns the mean.
double run_nll(const std::filesystem::path& model_path, const std::filesystem::path& data_csv,
               const std::filesystem::path& out_csv, bool has_header = false, const IntegratorConfig& integrator = {});

/// Distills an LFM checkpoint into N / k residual steps; writes distilled.lfm,
/// distill_loss_history.csv and distill_manifest.txt.
std::filesystem::path run_distill(const std::filesystem::path& model_path, int k, const DistillConfig& cfg,
                                  const std::filesystem::path& out_dir, const IntegratorConfig& integrator = {});

/// Runs the closed-form verification suite and writes its report. Returns true
/// when every check passed.
bool run_verify(const std::filesystem::path& out_file, std::vector<DivergenceReport>* reports = nullptr);

}  // namespace lfm
