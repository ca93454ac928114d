// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lfm/random.hpp"

namespace lfm {

/// Interpolation path between a left endpoint x_l and a right endpoint x_r.
///  ot:   x_l + t (x_r - x_l)
///  trig: cos(pi t / 2) x_l + sin(pi t / 2) x_r
enum class Interpolant : std::uint8_t { ot = 0, trig = 1 };

Eigen::VectorXd interp(Interpolant kind, double t, const Eigen::VectorXd& x_l, const Eigen::VectorXd& x_r);

/// Time derivative of interp at t.
Eigen::VectorXd interp_deriv(Interpolant kind, double t, const Eigen::VectorXd& x_l, const Eigen::VectorXd& x_r);

/// Batched path point and velocity target; column j uses time t[j].
void interp_batch(Interpolant kind, std::span<const double> t, const Samples& x_l, const Samples& x_r,
                  Samples& point, Samples& velocity);

/// Beta(alpha, beta) sampler for flow-matching times.
struct TimeSampler {
  double alpha = 1.0;
  double beta = 1.0;

  void validate() const;
  double sample(Rng& rng) const;
};

struct OuPair {
  Samples left;
  Samples right;
};

/// Draws `batch` left endpoints from `pool` and, independently, `batch` right
/// endpoints x_r = e^{-gamma} x_l' + sqrt(1 - e^{-2 gamma}) g, where x_l' is a
/// fresh draw from the pool and g ~ N(0, I). Indices are drawn with replacement.
OuPair ou_pair_sample(const Samples& pool, double gamma, Rng& rng, Eigen::Index batch);

/// Only the right endpoints of ou_pair_sample.
Samples ou_right_sample(const Samples& pool, double gamma, Rng& rng, Eigen::Index batch);

/// `batch` columns drawn uniformly with replacement from `pool`.
Samples draw_from_pool(const Samples& pool, Rng& rng, Eigen::Index batch);

struct DiagGaussian {
  Eigen::VectorXd mean;
  Eigen::VectorXd var;

  static DiagGaussian standard(Eigen::Index d);
  /// Sample mean and per-coordinate (population) variance.
  static DiagGaussian fit(const Samples& xs);

  Eigen::Index dim() const { return mean.size(); }
  void validate() const;
};

/// Law of e^{-t} X + sqrt(1 - e^{-2t}) Z for X ~ g, Z ~ N(0, I).
DiagGaussian ou_gaussian_marginal(const DiagGaussian& g, double t);

/// Geometric step schedule gamma_n = rho^{n-1} c with cumulative time stamps.
struct Schedule {
  double c = 0.0;
  double rho = 1.0;
  int n_blocks = 0;
  std::vector<double> gammas;
  std::vector<double> timestamps;  // t_0 = 0, ..., t_N

  double horizon() const { return timestamps.back(); }
};

Schedule make_schedule(double c, double rho, int n_blocks);

std::string_view to_string(Interpolant kind);
Interpolant parse_interpolant(std::string_view name);

}  // namespace lfm
