// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "lfm/flowmath.hpp"
#include "lfm/fmtrain.hpp"
#include "lfm/netcore.hpp"
#include "lfm/odeint.hpp"

namespace lfm {

/// One trained block: velocity field on rescaled time [0, 1] and its OU step size.
struct SubFlow {
  VelocityField field;
  double gamma = 0.0;
  Interpolant interpolant = Interpolant::trig;
};

/// N sub-flows composed into a data-to-noise transport. Block 1 acts on data.
struct LfmModel {
  int dim = 0;
  std::vector<SubFlow> blocks;
  IntegratorConfig integrator;

  void validate() const;
};

/// N' residual maps T(x) = x + f(x), applied noise side first.
struct DistilledModel {
  int dim = 0;
  std::vector<VelocityField> maps;

  void validate() const;
};

struct TrainedLfm {
  LfmModel model;
  std::vector<std::vector<double>> loss_histories;
  /// Pushed pools p_0 .. p_N; when pools are not retained only p_N is kept.
  std::vector<Samples> pools;
};

struct LfmTrainOptions {
  bool retain_pools = true;
  Eigen::Index chunk = 8192;  // columns per integration batch when pushing pools
};

/// Seed of block n (1-based) derived from the per-block base seed.
std::uint64_t block_seed(std::uint64_t base, int n);

/// Sequential block training. Block n < N interpolates from the current pool to
/// its OU image with step gamma_n; block N interpolates to N(0, I) directly.
/// After each block the whole pool is pushed forward through it.
TrainedLfm train_lfm(const Samples& data, const Schedule& schedule, const BlockTrainConfig& per_block,
                     const MlpSpec& spec, const IntegratorConfig& integrator, const LfmTrainOptions& options = {});

/// Noise-to-data map: applies the inverse blocks N..1 to the given noise.
Samples reverse_flow(const LfmModel& model, const Samples& noise);

/// Data-to-noise map through blocks 1..N.
Samples forward_flow(const LfmModel& model, const Samples& data);

/// Draws N(0, I) noise from `rng` and maps it to data space.
Samples generate(const LfmModel& model, Eigen::Index n_samples, Rng& rng);

/// Per-sample negative log-likelihood in nats.
Eigen::VectorXd nll(const LfmModel& model, const Samples& xs);

/// States q_0 .. q_N visited by one noise batch (q_N = noise) on the reverse chain.
std::vector<Samples> reverse_chain(const LfmModel& model, const Samples& noise);

struct DistillResult {
  DistilledModel model;
  std::vector<std::vector<double>> loss_histories;
  std::vector<double> initial_loss;  // full-pair regression loss at initialization
  std::vector<double> final_loss;    // same, after training
};

/// Fits N / k residual maps to the k-block segments of the reverse chain.
/// `chain` holds q_0 .. q_N for one shared noise batch; distilled step n maps
/// q_{N-k(n-1)} to q_{N-kn}. `spec` must have no time input.
DistillResult distill(const LfmModel& teacher, const std::vector<Samples>& chain, int k, const BlockTrainConfig& cfg,
                      const MlpSpec& spec);

Samples apply_distilled(const DistilledModel& dm, const Samples& noise);

Samples generate_distilled(const DistilledModel& dm, Eigen::Index n_samples, Rng& rng);

/// Standard normal log-density of each column.
Eigen::VectorXd standard_normal_logpdf(const Samples& xs);

}  // namespace lfm
