// SPDX-License-Identifier: Apache-2.0
#include "lfm/pipeline.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lfm/error.hpp"

namespace lfm {
namespace {

template <typename Fn>
Samples map_chunked(const Samples& xs, Eigen::Index chunk, Fn&& fn) {
  Samples out(xs.rows(), xs.cols());
  for (Eigen::Index begin = 0; begin < xs.cols(); begin += chunk) {
    const Eigen::Index len = std::min(chunk, xs.cols() - begin);
    out.middleCols(begin, len) = fn(Samples(xs.middleCols(begin, len)));
  }
  return out;
}

constexpr Eigen::Index kChunk = 8192;

// Runs one block's integration, prefixing numerical failures with the block number.
template <typename Fn>
Samples in_block(const char* op, std::size_t n, Fn&& fn) {
  try {
    return fn();
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(op) + ": block " + std::to_string(n) + ": " + e.what());
  }
}

double full_regression_loss(const VelocityField& f, const Samples& inputs, const Samples& targets) {
  const double t = 0.0;
  double total = 0.0;
  for (Eigen::Index begin = 0; begin < inputs.cols(); begin += kChunk) {
    const Eigen::Index len = std::min(kChunk, inputs.cols() - begin);
    total += (forward_batch(f, Samples(inputs.middleCols(begin, len)), t) - targets.middleCols(begin, len))
                 .squaredNorm();
  }
  return total / static_cast<double>(inputs.cols());
}

}  // namespace

void LfmModel::validate() const {
  if (dim < 1) throw ValidationError("model: dimension must be positive");
  if (blocks.empty()) throw ValidationError("model: needs at least one block");
  integrator.validate();
  for (std::size_t n = 0; n < blocks.size(); ++n) {
    if (blocks[n].field.dim() != dim) {
      throw DimensionError("model block " + std::to_string(n + 1), dim, blocks[n].field.dim());
    }
    if (!(blocks[n].gamma > 0.0)) {
      throw ValidationError("model block " + std::to_string(n + 1) + ": gamma must be positive");
    }
  }
}

void DistilledModel::validate() const {
  if (dim < 1) throw ValidationError("distilled model: dimension must be positive");
  if (maps.empty()) throw ValidationError("distilled model: needs at least one map");
  for (std::size_t n = 0; n < maps.size(); ++n) {
    if (maps[n].dim() != dim) throw DimensionError("distilled map " + std::to_string(n + 1), dim, maps[n].dim());
    if (maps[n].spec().time.kind != TimeEncoding::none) {
      throw ValidationError("distilled map " + std::to_string(n + 1) + " must not take a time input");
    }
  }
}

std::uint64_t block_seed(std::uint64_t base, int n) { return derive_seed(base, 0x100 + static_cast<std::uint64_t>(n)); }

TrainedLfm train_lfm(const Samples& data, const Schedule& schedule, const BlockTrainConfig& per_block,
                     const MlpSpec& spec, const IntegratorConfig& integrator, const LfmTrainOptions& options) {
  if (data.cols() == 0) throw ValidationError("train_lfm: data set is empty");
  if (schedule.n_blocks < 1 || static_cast<int>(schedule.gammas.size()) != schedule.n_blocks) {
    throw ValidationError("train_lfm: schedule must contain n_blocks >= 1 step sizes");
  }
  if (data.rows() != spec.input_dim) throw DimensionError("train_lfm data", spec.input_dim, data.rows());
  integrator.validate();

  TrainedLfm out;
  out.model.dim = spec.input_dim;
  out.model.integrator = integrator;
  const Eigen::Index d = data.rows();

  Samples pool = data;
  if (options.retain_pools) out.pools.push_back(pool);
  for (int n = 1; n <= schedule.n_blocks; ++n) {
    const double gamma = schedule.gammas[static_cast<std::size_t>(n - 1)];
    const bool last = n == schedule.n_blocks;
    RightSampler right;
    if (last) {
      right = [d](Rng& rng, Eigen::Index batch) { return standard_normal(d, batch, rng); };
    } else {
      right = [&pool, gamma](Rng& rng, Eigen::Index batch) { return ou_right_sample(pool, gamma, rng, batch); };
    }
    BlockTrainConfig cfg = per_block;
    cfg.seed = block_seed(per_block.seed, n);
    BlockTrainResult trained = train_block(pool, right, spec, cfg);

    Samples next = in_block("train_lfm push", static_cast<std::size_t>(n), [&] {
      return map_chunked(pool, options.chunk, [&](const Samples& x) {
        return integrate(trained.field, x, Direction::forward, integrator);
      });
    });
    pool = std::move(next);
    if (options.retain_pools || last) out.pools.push_back(pool);

    out.model.blocks.push_back({std::move(trained.field), gamma, per_block.interpolant});
    out.loss_histories.push_back(std::move(trained.loss_history));
  }
  return out;
}

Samples reverse_flow(const LfmModel& model, const Samples& noise) {
  model.validate();
  if (noise.rows() != model.dim) throw DimensionError("reverse_flow input", model.dim, noise.rows());
  Samples y = noise;
  for (std::size_t n = model.blocks.size(); n >= 1; --n) {
    y = in_block("reverse_flow", n, [&] {
      return map_chunked(y, kChunk, [&](const Samples& x) {
        return integrate(model.blocks[n - 1].field, x, Direction::reverse, model.integrator);
      });
    });
  }
  return y;
}

Samples forward_flow(const LfmModel& model, const Samples& data) {
  model.validate();
  if (data.rows() != model.dim) throw DimensionError("forward_flow input", model.dim, data.rows());
  Samples x = data;
  for (std::size_t n = 1; n <= model.blocks.size(); ++n) {
    x = in_block("forward_flow", n, [&] {
      return map_chunked(x, kChunk, [&](const Samples& c) {
        return integrate(model.blocks[n - 1].field, c, Direction::forward, model.integrator);
      });
    });
  }
  return x;
}

Samples generate(const LfmModel& model, Eigen::Index n_samples, Rng& rng) {
  model.validate();
  return reverse_flow(model, standard_normal(model.dim, n_samples, rng));
}

Eigen::VectorXd standard_normal_logpdf(const Samples& xs) {
  const double log_norm = -0.5 * static_cast<double>(xs.rows()) * std::log(2.0 * std::numbers::pi);
  return (log_norm - 0.5 * xs.colwise().squaredNorm().array()).matrix().transpose();
}

Eigen::VectorXd nll(const LfmModel& model, const Samples& xs) {
  model.validate();
  if (xs.rows() != model.dim) throw DimensionError("nll input", model.dim, xs.rows());
  Eigen::VectorXd result(xs.cols());
  for (Eigen::Index begin = 0; begin < xs.cols(); begin += kChunk) {
    const Eigen::Index len = std::min(kChunk, xs.cols() - begin);
    Samples x = xs.middleCols(begin, len);
    Eigen::VectorXd log_det = Eigen::VectorXd::Zero(len);
    for (std::size_t n = 0; n < model.blocks.size(); ++n) {
      FlowWithDivergence step;
      try {
        step = integrate_with_divergence(model.blocks[n].field, x, Direction::forward, model.integrator);
      } catch (const NumericalError& e) {
        throw NumericalError("nll: block " + std::to_string(n + 1) + ": " + e.what());
      }
      x = std::move(step.x);
      log_det += step.divint;
    }
    const Eigen::VectorXd log_lik = standard_normal_logpdf(x) + log_det;
    if (!log_lik.allFinite()) throw NumericalError("nll: non-finite log-likelihood after the final block");
    result.segment(begin, len) = -log_lik;
  }
  return result;
}

std::vector<Samples> reverse_chain(const LfmModel& model, const Samples& noise) {
  model.validate();
  if (noise.rows() != model.dim) throw DimensionError("reverse_chain input", model.dim, noise.rows());
  const std::size_t n_blocks = model.blocks.size();
  std::vector<Samples> chain(n_blocks + 1);
  chain[n_blocks] = noise;
  for (std::size_t n = n_blocks; n >= 1; --n) {
    chain[n - 1] = in_block("reverse_chain", n, [&] {
      return map_chunked(chain[n], kChunk, [&](const Samples& x) {
        return integrate(model.blocks[n - 1].field, x, Direction::reverse, model.integrator);
      });
    });
  }
  return chain;
}

DistillResult distill(const LfmModel& teacher, const std::vector<Samples>& chain, int k, const BlockTrainConfig& cfg,
                      const MlpSpec& spec) {
  teacher.validate();
  cfg.validate();
  spec.validate();
  const int n_blocks = static_cast<int>(teacher.blocks.size());
  if (k < 1 || n_blocks % k != 0) {
    throw ValidationError("distill: k = " + std::to_string(k) + " does not divide N = " + std::to_string(n_blocks));
  }
  if (static_cast<int>(chain.size()) != n_blocks + 1) {
    throw ValidationError("distill: expected " + std::to_string(n_blocks + 1) + " chain states, got " +
                          std::to_string(chain.size()));
  }
  if (spec.input_dim != teacher.dim) throw DimensionError("distill spec", teacher.dim, spec.input_dim);
  if (spec.time.kind != TimeEncoding::none) throw ValidationError("distill: residual maps take no time input");
  for (const Samples& s : chain) {
    if (s.rows() != teacher.dim || s.cols() != chain.back().cols() || s.cols() == 0) {
      throw ValidationError("distill: chain states must share dimension and particle count");
    }
  }

  const int n_steps = n_blocks / k;
  DistillResult out;
  out.model.dim = teacher.dim;
  std::vector<double> no_time(static_cast<std::size_t>(cfg.batch_size), 0.0);
  for (int n = 1; n <= n_steps; ++n) {
    const Samples& inputs = chain[static_cast<std::size_t>(n_blocks - k * (n - 1))];
    const Samples targets = chain[static_cast<std::size_t>(n_blocks - k * n)] - inputs;

    const std::uint64_t seed = block_seed(cfg.seed, n);
    Rng init_rng = make_rng(seed, streams::init);
    Rng index_rng = make_rng(seed, streams::left_index);
    VelocityField f = VelocityField::glorot(spec, init_rng);
    ParamVector params = f.params();
    AdamState state = AdamState::zeros(params.size());
    out.initial_loss.push_back(full_regression_loss(f, inputs, targets));

    std::uniform_int_distribution<Eigen::Index> pick(0, inputs.cols() - 1);
    Samples x(inputs.rows(), cfg.batch_size);
    Samples y(inputs.rows(), cfg.batch_size);
    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(cfg.n_batches));
    for (long b = 0; b < cfg.n_batches; ++b) {
      for (Eigen::Index j = 0; j < cfg.batch_size; ++j) {
        const Eigen::Index idx = pick(index_rng);
        x.col(j) = inputs.col(idx);
        y.col(j) = targets.col(idx);
      }
      const LossGrad lg = loss_and_grad(f, x, no_time, y);
      if (!std::isfinite(lg.loss)) {
        throw NumericalError("distill: loss became non-finite at step " + std::to_string(n) + ", batch " +
                             std::to_string(b));
      }
      history.push_back(lg.loss);
      adam_step(params, lg.grad, state, cfg.adam);
      f.set_params(params);
    }
    out.final_loss.push_back(full_regression_loss(f, inputs, targets));
    out.loss_histories.push_back(std::move(history));
    out.model.maps.push_back(std::move(f));
  }
  return out;
}

Samples apply_distilled(const DistilledModel& dm, const Samples& noise) {
  dm.validate();
  if (noise.rows() != dm.dim) throw DimensionError("distilled model input", dm.dim, noise.rows());
  Samples y = noise;
  for (const VelocityField& f : dm.maps) {
    y = map_chunked(y, kChunk, [&](const Samples& c) -> Samples { return c + forward_batch(f, c, 0.0); });
  }
  return y;
}

Samples generate_distilled(const DistilledModel& dm, Eigen::Index n_samples, Rng& rng) {
  dm.validate();
  return apply_distilled(dm, standard_normal(dm.dim, n_samples, rng));
}

}  // namespace lfm
