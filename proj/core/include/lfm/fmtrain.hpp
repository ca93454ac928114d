// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "lfm/flowmath.hpp"
#include "lfm/netcore.hpp"

namespace lfm {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double decay_factor = 1.0;  // lr is multiplied by this every `decay_every` steps
  long decay_every = 1000;

  void validate() const;
};

struct AdamState {
  ParamVector m;
  ParamVector v;
  long step = 0;

  static AdamState zeros(Eigen::Index n) { return {ParamVector::Zero(n), ParamVector::Zero(n), 0}; }
};

/// Learning rate used by the next Adam step, given the number of completed steps.
double effective_lr(const AdamConfig& cfg, long completed_steps);

/// One bias-corrected Adam update of `params` in place.
void adam_step(ParamVector& params, const ParamVector& grad, AdamState& state, const AdamConfig& cfg);

struct BlockTrainConfig {
  AdamConfig adam;
  Eigen::Index batch_size = 256;
  long n_batches = 1000;
  Interpolant interpolant = Interpolant::trig;
  TimeSampler time_sampler;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Produces a batch of right endpoints from the supplied generator.
using RightSampler = std::function<Samples(Rng&, Eigen::Index batch)>;

struct BlockTrainResult {
  VelocityField field;
  std::vector<double> loss_history;
};

/// Fits one flow-matching sub-flow from `left_pool` to the law produced by
/// `right_sampler`. Each batch draws left endpoints from the pool, right
/// endpoints from the sampler, one Beta time per sample, and takes one Adam
/// step on the mean squared velocity residual.
///
/// Random streams (all derived from cfg.seed): init, left indices, right
/// sampler, times. Identical inputs give bit-identical results.
BlockTrainResult train_block(const Samples& left_pool, const RightSampler& right_sampler, const MlpSpec& spec,
                             const BlockTrainConfig& cfg);

}  // namespace lfm
