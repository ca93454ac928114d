// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "lfm/error.hpp"
#include "lfm/fmtrain.hpp"
#include "oracles.hpp"

namespace {

using lfm::AdamConfig;
using lfm::AdamState;
using lfm::BlockTrainConfig;

lfm::RightSampler gaussian_sampler(int d, double sigma) {
  return [d, sigma](lfm::Rng& rng, Eigen::Index n) -> lfm::Samples { return sigma * lfm::standard_normal(d, n, rng); };
}

double window_mean(const std::vector<double>& h, std::size_t begin, std::size_t end) {
  return std::accumulate(h.begin() + static_cast<long>(begin), h.begin() + static_cast<long>(end), 0.0) /
         static_cast<double>(end - begin);
}

// Grid RMS of v(x, t) - a(t) x over grid points with |x| <= 2, t in {0.1, ..., 0.9}.
double oracle_rms(const lfm::VelocityField& f, lfm::Interpolant kind, double vl, double vr) {
  lfm::Samples grid(2, 0);
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const Eigen::Vector2d x(-2.0 + 0.2 * i, -2.0 + 0.2 * j);
      if (x.norm() > 2.0 + 1e-12) continue;
      grid.conservativeResize(2, grid.cols() + 1);
      grid.col(grid.cols() - 1) = x;
    }
  }
  double sq = 0.0;
  Eigen::Index count = 0;
  for (int it = 1; it <= 9; ++it) {
    const double t = 0.1 * it;
    const double a = oracle::gaussian_velocity_coeff(kind, t, vl, vr);
    sq += (lfm::forward_batch(f, grid, t) - a * grid).squaredNorm();
    count += grid.size();
  }
  return std::sqrt(sq / static_cast<double>(count));
}

TEST(FmtrainTest, AdamHandComputedFirstStep) {
  AdamConfig cfg;
  cfg.lr = 0.01;
  lfm::ParamVector p = lfm::ParamVector::Constant(1, 1.0);
  AdamState st = AdamState::zeros(1);
  lfm::adam_step(p, lfm::ParamVector::Constant(1, 0.5), st, cfg);
  // m = 0.05, v = 2.5e-4, m_hat = 0.5, v_hat = 0.25.
  EXPECT_NEAR(p[0] - 1.0, -0.01 * 0.5 / (0.5 + 1e-8), 1e-15);
  EXPECT_NEAR(p[0] - 1.0, -0.0099999998, 1e-15);
  EXPECT_DOUBLE_EQ(st.m[0], 0.05);
  EXPECT_DOUBLE_EQ(st.v[0], 2.5e-4);
  EXPECT_EQ(st.step, 1);
}

TEST(FmtrainTest, AdamSecondStepRecurrence) {
  AdamConfig cfg;
  cfg.lr = 0.1;
  lfm::ParamVector p = lfm::ParamVector::Zero(2);
  AdamState st = AdamState::zeros(2);
  const lfm::ParamVector g1 = (lfm::ParamVector(2) << 1.0, -2.0).finished();
  const lfm::ParamVector g2 = (lfm::ParamVector(2) << 3.0, 0.5).finished();
  lfm::adam_step(p, g1, st, cfg);
  lfm::adam_step(p, g2, st, cfg);
  for (int i = 0; i < 2; ++i) {
    double m = 0, v = 0, x = 0;
    for (int s = 1; s <= 2; ++s) {
      const double g = s == 1 ? g1[i] : g2[i];
      m = 0.9 * m + 0.1 * g;
      v = 0.999 * v + 0.001 * g * g;
      x -= 0.1 * (m / (1 - std::pow(0.9, s))) / (std::sqrt(v / (1 - std::pow(0.999, s))) + 1e-8);
    }
    EXPECT_NEAR(p[i], x, 1e-15);
  }
}

TEST(FmtrainTest, ZeroGradientLeavesParams) {
  AdamConfig cfg;
  lfm::ParamVector p = lfm::ParamVector::Constant(3, 0.7);
  AdamState st = AdamState::zeros(3);
  lfm::adam_step(p, lfm::ParamVector::Zero(3), st, cfg);
  EXPECT_EQ(p, lfm::ParamVector::Constant(3, 0.7));
  EXPECT_EQ(st.step, 1);
}

TEST(FmtrainTest, LearningRateDecay) {
  AdamConfig cfg;
  cfg.lr = 2e-3;
  cfg.decay_factor = 0.99;
  cfg.decay_every = 100;
  EXPECT_EQ(lfm::effective_lr(cfg, 0), 2e-3);
  EXPECT_EQ(lfm::effective_lr(cfg, 99), 2e-3);
  EXPECT_DOUBLE_EQ(lfm::effective_lr(cfg, 100), 0.99 * 2e-3);
  EXPECT_DOUBLE_EQ(lfm::effective_lr(cfg, 250), 0.99 * 0.99 * 2e-3);

  // The step after decay_every updates uses the decayed rate.
  lfm::ParamVector p = lfm::ParamVector::Zero(1);
  AdamState st = AdamState::zeros(1);
  st.step = 100;
  st.m.setConstant(0.0);
  st.v.setConstant(0.0);
  AdamConfig plain = cfg;
  plain.decay_factor = 1.0;
  lfm::ParamVector q = p;
  AdamState st2 = st;
  lfm::adam_step(p, lfm::ParamVector::Constant(1, 1.0), st, cfg);
  lfm::adam_step(q, lfm::ParamVector::Constant(1, 1.0), st2, plain);
  EXPECT_NEAR(p[0] / q[0], 0.99, 1e-12);
}

TEST(FmtrainTest, AdamShapeMismatch) {
  lfm::ParamVector p = lfm::ParamVector::Zero(3);
  AdamState st = AdamState::zeros(3);
  EXPECT_THROW(lfm::adam_step(p, lfm::ParamVector::Zero(2), st, {}), lfm::DimensionError);
  AdamState bad = AdamState::zeros(2);
  EXPECT_THROW(lfm::adam_step(p, lfm::ParamVector::Zero(3), bad, {}), lfm::DimensionError);
}

TEST(FmtrainTest, ConfigValidation) {
  AdamConfig a;
  a.lr = 0.0;
  EXPECT_THROW(a.validate(), lfm::ValidationError);
  a = {};
  a.decay_factor = 1.5;
  EXPECT_THROW(a.validate(), lfm::ValidationError);
  BlockTrainConfig b;
  b.batch_size = 0;
  EXPECT_THROW(b.validate(), lfm::ValidationError);
}

TEST(FmtrainTest, DegeneratePoolsLearnZeroVelocity) {
  const lfm::Samples point = (lfm::Samples(2, 1) << 0.5, -0.25).finished();
  BlockTrainConfig cfg;
  cfg.batch_size = 64;
  cfg.n_batches = 500;
  cfg.interpolant = lfm::Interpolant::ot;
  cfg.adam.lr = 1e-2;
  cfg.seed = 1;
  auto right = [&](lfm::Rng&, Eigen::Index n) -> lfm::Samples { return point.replicate(1, n); };
  const auto res = lfm::train_block(point, right, {2, {32, 32}, lfm::Activation::softplus, {}}, cfg);
  ASSERT_EQ(res.loss_history.size(), 500u);
  EXPECT_LT(res.loss_history.back(), 1e-6);
}

TEST(FmtrainTest, MatchesGaussianOracleTrig) {
  lfm::Rng rng(2);
  const lfm::Samples left = lfm::standard_normal(2, 50000, rng);
  BlockTrainConfig cfg;
  cfg.batch_size = 512;
  cfg.n_batches = 2000;
  cfg.interpolant = lfm::Interpolant::trig;
  cfg.adam.lr = 7e-3;
  cfg.adam.decay_factor = 0.5;
  cfg.adam.decay_every = 300;
  cfg.seed = 3;
  const lfm::MlpSpec spec{2, {64, 64}, lfm::Activation::softplus, {lfm::TimeEncoding::sinusoidal, 3}};
  const auto res = lfm::train_block(left, gaussian_sampler(2, 0.5), spec, cfg);
  EXPECT_LT(oracle_rms(res.field, lfm::Interpolant::trig, 1.0, 0.25), 0.05);
  const auto& h = res.loss_history;
  EXPECT_LT(window_mean(h, h.size() * 9 / 10, h.size()), window_mean(h, 0, h.size() / 10));
  for (double l : h) EXPECT_GE(l, 0.0);
}

TEST(FmtrainTest, Reproducible) {
  lfm::Rng rng(4);
  const lfm::Samples left = lfm::standard_normal(2, 1000, rng);
  BlockTrainConfig cfg;
  cfg.batch_size = 32;
  cfg.n_batches = 50;
  cfg.seed = 77;
  const lfm::MlpSpec spec{2, {16}, lfm::Activation::tanh, {}};
  const auto a = lfm::train_block(left, gaussian_sampler(2, 1.0), spec, cfg);
  const auto b = lfm::train_block(left, gaussian_sampler(2, 1.0), spec, cfg);
  EXPECT_EQ(a.field.params(), b.field.params());
  EXPECT_EQ(a.loss_history, b.loss_history);
  cfg.seed = 78;
  const auto c = lfm::train_block(left, gaussian_sampler(2, 1.0), spec, cfg);
  EXPECT_NE(a.loss_history, c.loss_history);
}

TEST(FmtrainTest, NonFiniteLossNamesBatch) {
  lfm::Rng rng(5);
  const lfm::Samples left = lfm::standard_normal(2, 100, rng);
  BlockTrainConfig cfg;
  cfg.batch_size = 8;
  cfg.n_batches = 10;
  int calls = 0;
  auto right = [&](lfm::Rng& r, Eigen::Index n) -> lfm::Samples {
    lfm::Samples x = lfm::standard_normal(2, n, r);
    if (++calls == 4) x(0, 0) = std::nan("");
    return x;
  };
  try {
    lfm::train_block(left, right, {2, {8}, lfm::Activation::relu, {}}, cfg);
    FAIL();
  } catch (const lfm::NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("batch 3"), std::string::npos) << e.what();
  }
}

TEST(FmtrainTest, DimensionMismatch) {
  lfm::Rng rng(6);
  const lfm::Samples left = lfm::standard_normal(3, 10, rng);
  BlockTrainConfig cfg;
  cfg.batch_size = 4;
  cfg.n_batches = 2;
  EXPECT_THROW(lfm::train_block(left, gaussian_sampler(3, 1.0), {2, {8}, lfm::Activation::relu, {}}, cfg),
               lfm::DimensionError);
  const lfm::Samples ok = lfm::standard_normal(2, 10, rng);
  EXPECT_THROW(lfm::train_block(ok, gaussian_sampler(3, 1.0), {2, {8}, lfm::Activation::relu, {}}, cfg),
               lfm::DimensionError);
  EXPECT_THROW(lfm::train_block(lfm::Samples(2, 0), gaussian_sampler(2, 1.0), {2, {8}, lfm::Activation::relu, {}}, cfg),
               lfm::ValidationError);
}

}  // namespace
