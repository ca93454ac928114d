// SPDX-License-Identifier: Apache-2.0
#include "lfm/flowmath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "lfm/error.hpp"

namespace lfm {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void check_time(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("interpolant time must lie in [0, 1], got " + std::to_string(t));
}

void check_endpoints(const Eigen::VectorXd& x_l, const Eigen::VectorXd& x_r) {
  if (x_l.size() != x_r.size()) throw DimensionError("interpolant right endpoint", x_l.size(), x_r.size());
}

/// Coefficients (a, b) of x_l and x_r in the path point, and (da, db) in its derivative.
struct PathCoeffs {
  double a, b, da, db;
};

PathCoeffs coeffs(Interpolant kind, double t) {
  if (kind == Interpolant::ot) return {1.0 - t, t, -1.0, 1.0};
  const double c = std::cos(kHalfPi * t);
  const double s = std::sin(kHalfPi * t);
  return {c, s, -kHalfPi * s, kHalfPi * c};
}

}  // namespace

Eigen::VectorXd interp(Interpolant kind, double t, const Eigen::VectorXd& x_l, const Eigen::VectorXd& x_r) {
  check_time(t);
  check_endpoints(x_l, x_r);
  if (kind == Interpolant::ot) return x_l + t * (x_r - x_l);
  const auto k = coeffs(kind, t);
  return k.a * x_l + k.b * x_r;
}

Eigen::VectorXd interp_deriv(Interpolant kind, double t, const Eigen::VectorXd& x_l, const Eigen::VectorXd& x_r) {
  check_time(t);
  check_endpoints(x_l, x_r);
  if (kind == Interpolant::ot) return x_r - x_l;
  const auto k = coeffs(kind, t);
  return k.da * x_l + k.db * x_r;
}

void interp_batch(Interpolant kind, std::span<const double> t, const Samples& x_l, const Samples& x_r,
                  Samples& point, Samples& velocity) {
  if (x_l.rows() != x_r.rows() || x_l.cols() != x_r.cols()) {
    throw DimensionError("interpolant endpoint batch", x_l.cols(), x_r.cols());
  }
  if (static_cast<Eigen::Index>(t.size()) != x_l.cols()) {
    throw DimensionError("interpolant time vector", x_l.cols(), static_cast<long>(t.size()));
  }
  point.resize(x_l.rows(), x_l.cols());
  velocity.resize(x_l.rows(), x_l.cols());
  for (Eigen::Index j = 0; j < x_l.cols(); ++j) {
    const double tj = t[static_cast<std::size_t>(j)];
    check_time(tj);
    const auto k = coeffs(kind, tj);
    if (kind == Interpolant::ot) {
      point.col(j) = x_l.col(j) + tj * (x_r.col(j) - x_l.col(j));
      velocity.col(j) = x_r.col(j) - x_l.col(j);
    } else {
      point.col(j) = k.a * x_l.col(j) + k.b * x_r.col(j);
      velocity.col(j) = k.da * x_l.col(j) + k.db * x_r.col(j);
    }
  }
}

void TimeSampler::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw ValidationError("time sampler: Beta parameters must be positive, got (" + std::to_string(alpha) + ", " +
                          std::to_string(beta) + ")");
  }
}

double TimeSampler::sample(Rng& rng) const {
  // Beta(a, b) as X / (X + Y) with X ~ Gamma(a), Y ~ Gamma(b).
  std::gamma_distribution<double> gx(alpha, 1.0);
  std::gamma_distribution<double> gy(beta, 1.0);
  const double x = gx(rng);
  const double y = gy(rng);
  const double s = x + y;
  if (s <= 0.0) return 0.5;
  return std::clamp(x / s, 0.0, 1.0);
}

Samples draw_from_pool(const Samples& pool, Rng& rng, Eigen::Index batch) {
  if (pool.cols() == 0) throw ValidationError("sample pool is empty");
  std::uniform_int_distribution<Eigen::Index> pick(0, pool.cols() - 1);
  Samples out(pool.rows(), batch);
  for (Eigen::Index j = 0; j < batch; ++j) out.col(j) = pool.col(pick(rng));
  return out;
}

Samples ou_right_sample(const Samples& pool, double gamma, Rng& rng, Eigen::Index batch) {
  if (!(gamma > 0.0)) throw ValidationError("OU step size must be positive, got " + std::to_string(gamma));
  Samples right = draw_from_pool(pool, rng, batch);
  const double decay = std::exp(-gamma);
  const double noise_scale = std::sqrt(-std::expm1(-2.0 * gamma));
  right = decay * right + noise_scale * standard_normal(pool.rows(), batch, rng);
  return right;
}

OuPair ou_pair_sample(const Samples& pool, double gamma, Rng& rng, Eigen::Index batch) {
  OuPair pair;
  pair.left = draw_from_pool(pool, rng, batch);
  pair.right = ou_right_sample(pool, gamma, rng, batch);
  return pair;
}

DiagGaussian DiagGaussian::standard(Eigen::Index d) {
  return {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d)};
}

DiagGaussian DiagGaussian::fit(const Samples& xs) {
  if (xs.cols() == 0) throw ValidationError("cannot fit a Gaussian to an empty sample set");
  DiagGaussian g;
  g.mean = xs.rowwise().mean();
  g.var = (xs.colwise() - g.mean).array().square().rowwise().mean();
  return g;
}

void DiagGaussian::validate() const {
  if (mean.size() != var.size()) throw DimensionError("Gaussian variance vector", mean.size(), var.size());
  if (!mean.allFinite()) throw ValidationError("Gaussian mean has non-finite entries");
  for (Eigen::Index i = 0; i < var.size(); ++i) {
    if (!(var[i] > 0.0) || !std::isfinite(var[i])) {
      throw ValidationError("Gaussian variance must be positive and finite (coordinate " + std::to_string(i) + ")");
    }
  }
}

DiagGaussian ou_gaussian_marginal(const DiagGaussian& g, double t) {
  if (!(t >= 0.0)) throw ValidationError("OU time must be non-negative, got " + std::to_string(t));
  g.validate();
  const double decay = std::exp(-t);
  const double decay2 = std::exp(-2.0 * t);
  const double fresh = -std::expm1(-2.0 * t);
  DiagGaussian out;
  out.mean = decay * g.mean;
  out.var = (decay2 * g.var.array() + fresh).matrix();
  return out;
}

Schedule make_schedule(double c, double rho, int n_blocks) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("schedule: c must be positive, got " + std::to_string(c));
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw ValidationError("schedule: rho must be positive, got " + std::to_string(rho));
  }
  if (n_blocks < 1) throw ValidationError("schedule: n_blocks must be >= 1, got " + std::to_string(n_blocks));
  Schedule s{c, rho, n_blocks, {}, {0.0}};
  for (int n = 0; n < n_blocks; ++n) {
    const double gamma = std::pow(rho, n) * c;
    s.gammas.push_back(gamma);
    s.timestamps.push_back(s.timestamps.back() + gamma);
  }
  return s;
}

std::string_view to_string(Interpolant kind) { return kind == Interpolant::ot ? "ot" : "trig"; }

Interpolant parse_interpolant(std::string_view name) {
  if (name == "ot") return Interpolant::ot;
  if (name == "trig") return Interpolant::trig;
  throw ValidationError("unknown interpolant '" + std::string(name) + "' (expected ot or trig)");
}

}  // namespace lfm
