// SPDX-License-Identifier: Apache-2.0
#include "lfm/fmtrain.hpp"

#include <cmath>
#include <string>

#include "lfm/error.hpp"

namespace lfm {

void AdamConfig::validate() const {
  if (!(lr > 0.0)) throw ValidationError("adam: lr must be positive, got " + std::to_string(lr));
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ValidationError("adam: beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ValidationError("adam: beta2 must lie in [0, 1)");
  if (!(eps > 0.0)) throw ValidationError("adam: eps must be positive");
  if (!(decay_factor > 0.0 && decay_factor <= 1.0)) {
    throw ValidationError("adam: decay_factor must lie in (0, 1], got " + std::to_string(decay_factor));
  }
  if (decay_every < 1) throw ValidationError("adam: decay_every must be >= 1");
}

double effective_lr(const AdamConfig& cfg, long completed_steps) {
  return cfg.lr * std::pow(cfg.decay_factor, static_cast<double>(completed_steps / cfg.decay_every));
}

void adam_step(ParamVector& params, const ParamVector& grad, AdamState& state, const AdamConfig& cfg) {
  if (grad.size() != params.size()) throw DimensionError("adam gradient", params.size(), grad.size());
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw DimensionError("adam state", params.size(), state.m.size());
  }
  const double lr = effective_lr(cfg, state.step);
  ++state.step;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  params.array() -= lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + cfg.eps);
}

void BlockTrainConfig::validate() const {
  adam.validate();
  time_sampler.validate();
  if (batch_size < 1) throw ValidationError("training: batch_size must be >= 1");
  if (n_batches < 1) throw ValidationError("training: n_batches must be >= 1");
}

BlockTrainResult train_block(const Samples& left_pool, const RightSampler& right_sampler, const MlpSpec& spec,
                             const BlockTrainConfig& cfg) {
  spec.validate();
  cfg.validate();
  if (left_pool.cols() == 0) throw ValidationError("train_block: left pool is empty");
  if (left_pool.rows() != spec.input_dim) throw DimensionError("train_block left pool", spec.input_dim, left_pool.rows());

  Rng init_rng = make_rng(cfg.seed, streams::init);
  Rng left_rng = make_rng(cfg.seed, streams::left_index);
  Rng right_rng = make_rng(cfg.seed, streams::right);
  Rng time_rng = make_rng(cfg.seed, streams::time);

  VelocityField field = VelocityField::glorot(spec, init_rng);
  ParamVector params = field.params();
  AdamState state = AdamState::zeros(params.size());

  BlockTrainResult result{field, {}};
  result.loss_history.reserve(static_cast<std::size_t>(cfg.n_batches));
  std::vector<double> times(static_cast<std::size_t>(cfg.batch_size));
  Samples point;
  Samples velocity;

  for (long b = 0; b < cfg.n_batches; ++b) {
    const Samples x_l = draw_from_pool(left_pool, left_rng, cfg.batch_size);
    const Samples x_r = right_sampler(right_rng, cfg.batch_size);
    if (x_r.rows() != x_l.rows() || x_r.cols() != x_l.cols()) {
      throw DimensionError("train_block right sampler batch", x_l.rows(), x_r.rows());
    }
    for (double& t : times) t = cfg.time_sampler.sample(time_rng);
    interp_batch(cfg.interpolant, times, x_l, x_r, point, velocity);

    const LossGrad lg = loss_and_grad(field, point, times, velocity);
    if (!std::isfinite(lg.loss)) {
      throw NumericalError("flow-matching loss became non-finite at batch " + std::to_string(b));
    }
    result.loss_history.push_back(lg.loss);
    adam_step(params, lg.grad, state, cfg.adam);
    field.set_params(params);
  }
  result.field = std::move(field);
  return result;
}

}  // namespace lfm
