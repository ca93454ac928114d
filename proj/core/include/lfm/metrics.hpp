// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lfm/flowmath.hpp"
#include "lfm/random.hpp"

namespace lfm {

/// chi^2(p || q) = int p^2 / q - 1 for diagonal Gaussians. Throws
/// ValidationError("chi2 divergent") when 2 / var_p - 1 / var_q <= 0 in some coordinate.
double chi2_gaussian(const DiagGaussian& p, const DiagGaussian& q);

double kl_gaussian(const DiagGaussian& p, const DiagGaussian& q);

/// 2-Wasserstein distance between diagonal Gaussians.
double w2_gaussian(const DiagGaussian& p, const DiagGaussian& q);

/// Pushforward of a diagonal Gaussian under x -> diag(a) x + b.
DiagGaussian affine_pushforward(const DiagGaussian& g, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// V-statistic 2 E|x - y| - E|x - x'| - E|y - y'|. Symmetric in its arguments
/// bit for bit (the pair is put in a canonical order before summation).
double energy_distance(const Samples& x, const Samples& y);

/// Label-permutation p-value (1 + #{perm >= observed}) / (1 + n_perm).
double permutation_pvalue(const Samples& x, const Samples& y, int n_perm, Rng& rng);

struct DivergenceReport {
  std::string name;
  std::optional<double> chi2;
  std::optional<double> kl;
  std::optional<double> w2;
  double measured = 0.0;
  double bound_rhs = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// One line per report: name, measured, bound, PASS/FAIL.
std::string format_report(const std::vector<DivergenceReport>& reports);

/// chi^2(OU_gamma p || q) <= e^{-2 gamma} chi^2(p || q) for p = N(m, I), q = N(0, I).
/// Each m in `means` must have the same dimension.
std::vector<DivergenceReport> check_ou_contraction(const std::vector<Eigen::VectorXd>& means,
                                                   const std::vector<double>& gammas);

/// W2(P, OU_delta P) <= C5 sqrt(delta), C5 = sqrt(M2(P) + 2 d), for a Gaussian P.
std::vector<DivergenceReport> check_initial_diffusion_w2(const DiagGaussian& p, const std::vector<double>& deltas);

/// Same bound with W2 measured between empirical samples of P and their OU
/// diffusion, using the synchronous coupling (an upper bound on W2).
std::vector<DivergenceReport> check_initial_diffusion_w2(const Samples& p, const std::vector<double>& deltas,
                                                         Rng& rng);

/// f-divergences are invariant under an invertible diagonal affine map.
/// chi^2 is included only when it converges.
DivergenceReport check_bidirectional_dpi(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const DiagGaussian& p,
                                         const DiagGaussian& q, double tolerance = 1e-10);

/// KL(p || q) <= chi^2(p || q) on a convergent pair.
DivergenceReport check_kl_le_chi2(const DiagGaussian& p, const DiagGaussian& q);

/// The fixed closed-form suite run by the `verify` command.
std::vector<DivergenceReport> run_verify_suite();

}  // namespace lfm
