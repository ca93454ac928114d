// SPDX-License-Identifier: Apache-2.0
#include "lfm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "lfm/error.hpp"

namespace lfm {
namespace {

void check_pair(const DiagGaussian& p, const DiagGaussian& q) {
  p.validate();
  q.validate();
  if (p.dim() != q.dim()) throw DimensionError("Gaussian pair", p.dim(), q.dim());
}

double mean_distance(const Samples& a, const Samples& b) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) total += (a.col(i) - b.col(j)).norm();
  }
  return total / (static_cast<double>(a.cols()) * static_cast<double>(b.cols()));
}

bool canonical_first(const Samples& x, const Samples& y) {
  if (x.cols() != y.cols()) return x.cols() < y.cols();
  return !std::lexicographical_compare(y.data(), y.data() + y.size(), x.data(), x.data() + x.size());
}

DivergenceReport make_report(std::string name, double measured, double bound, double tolerance) {
  DivergenceReport r;
  r.name = std::move(name);
  r.measured = measured;
  r.bound_rhs = bound;
  r.tolerance = tolerance;
  r.passed = std::isfinite(measured) && measured <= bound + tolerance;
  return r;
}

}  // namespace

double chi2_gaussian(const DiagGaussian& p, const DiagGaussian& q) {
  check_pair(p, q);
  double log_integral = 0.0;
  for (Eigen::Index i = 0; i < p.dim(); ++i) {
    const double vp = p.var[i];
    const double vq = q.var[i];
    const double denom = 2.0 * vq - vp;
    if (!(denom > 0.0)) throw ValidationError("chi2 divergent (coordinate " + std::to_string(i) + ")");
    const double dm = p.mean[i] - q.mean[i];
    log_integral += std::log(vq) - 0.5 * std::log(vp) - 0.5 * std::log(denom) + dm * dm / denom;
  }
  return std::max(0.0, std::expm1(log_integral));
}

double kl_gaussian(const DiagGaussian& p, const DiagGaussian& q) {
  check_pair(p, q);
  double kl = 0.0;
  for (Eigen::Index i = 0; i < p.dim(); ++i) {
    const double ratio = p.var[i] / q.var[i];
    const double dm = p.mean[i] - q.mean[i];
    kl += 0.5 * (ratio + dm * dm / q.var[i] - 1.0 - std::log(ratio));
  }
  return std::max(0.0, kl);
}

double w2_gaussian(const DiagGaussian& p, const DiagGaussian& q) {
  check_pair(p, q);
  const double mean_part = (p.mean - q.mean).squaredNorm();
  const double cov_part = (p.var.array().sqrt() - q.var.array().sqrt()).square().sum();
  return std::sqrt(mean_part + cov_part);
}

DiagGaussian affine_pushforward(const DiagGaussian& g, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  g.validate();
  if (a.size() != g.dim()) throw DimensionError("affine scale", g.dim(), a.size());
  if (b.size() != g.dim()) throw DimensionError("affine shift", g.dim(), b.size());
  if ((a.array() == 0.0).any()) throw ValidationError("affine map is singular");
  return {(a.array() * g.mean.array()).matrix() + b, (a.array().square() * g.var.array()).matrix()};
}

double energy_distance(const Samples& x, const Samples& y) {
  if (x.cols() == 0 || y.cols() == 0) throw ValidationError("energy_distance: empty sample set");
  if (x.rows() != y.rows()) throw DimensionError("energy_distance second sample", x.rows(), y.rows());
  const Samples& a = canonical_first(x, y) ? x : y;
  const Samples& b = canonical_first(x, y) ? y : x;
  return 2.0 * mean_distance(a, b) - mean_distance(a, a) - mean_distance(b, b);
}

double permutation_pvalue(const Samples& x, const Samples& y, int n_perm, Rng& rng) {
  if (x.cols() == 0 || y.cols() == 0) throw ValidationError("permutation_pvalue: empty sample set");
  if (x.rows() != y.rows()) throw DimensionError("permutation_pvalue second sample", x.rows(), y.rows());
  if (n_perm < 1) throw ValidationError("permutation_pvalue: n_perm must be >= 1");
  const Eigen::Index n = x.cols();
  const Eigen::Index m = y.cols();
  const Eigen::Index total = n + m;
  Samples pooled(x.rows(), total);
  pooled << x, y;

  // Upper triangle of the pooled distance matrix, row by row.
  std::vector<float> dist;
  dist.reserve(static_cast<std::size_t>(total * (total - 1) / 2));
  for (Eigen::Index i = 0; i < total; ++i) {
    for (Eigen::Index j = i + 1; j < total; ++j) dist.push_back(static_cast<float>((pooled.col(i) - pooled.col(j)).norm()));
  }

  std::vector<char> in_x(static_cast<std::size_t>(total), 0);
  std::fill(in_x.begin(), in_x.begin() + n, 1);
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  auto statistic = [&] {
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < total; ++i) {
      const bool xi = in_x[static_cast<std::size_t>(i)];
      for (Eigen::Index j = i + 1; j < total; ++j, ++k) {
        const double dij = dist[k];
        const bool xj = in_x[static_cast<std::size_t>(j)];
        if (xi && xj) {
          sxx += dij;
        } else if (!xi && !xj) {
          syy += dij;
        } else {
          sxy += dij;
        }
      }
    }
    return 2.0 * sxy / (nn * mm) - 2.0 * sxx / (nn * nn) - 2.0 * syy / (mm * mm);
  };

  const double observed = statistic();
  int at_least = 0;
  for (int p = 0; p < n_perm; ++p) {
    for (Eigen::Index i = total - 1; i > 0; --i) {
      std::uniform_int_distribution<Eigen::Index> pick(0, i);
      std::swap(in_x[static_cast<std::size_t>(i)], in_x[static_cast<std::size_t>(pick(rng))]);
    }
    if (statistic() >= observed) ++at_least;
  }
  return (1.0 + at_least) / (1.0 + n_perm);
}

std::string format_report(const std::vector<DivergenceReport>& reports) {
  std::ostringstream os;
  os << std::setprecision(10);
  for (const auto& r : reports) {
    os << r.name << ' ' << r.measured << ' ' << r.bound_rhs << ' ' << (r.passed ? "PASS" : "FAIL") << '\n';
  }
  return os.str();
}

std::vector<DivergenceReport> check_ou_contraction(const std::vector<Eigen::VectorXd>& means,
                                                   const std::vector<double>& gammas) {
  std::vector<DivergenceReport> out;
  for (std::size_t i = 0; i < means.size(); ++i) {
    const DiagGaussian p{means[i], Eigen::VectorXd::Ones(means[i].size())};
    const DiagGaussian q = DiagGaussian::standard(means[i].size());
    const double before = chi2_gaussian(p, q);
    for (double gamma : gammas) {
      const double after = chi2_gaussian(ou_gaussian_marginal(p, gamma), q);
      auto r = make_report("ou_contraction[m" + std::to_string(i) + ",gamma=" + std::to_string(gamma) + "]", after,
                           std::exp(-2.0 * gamma) * before, 1e-12);
      r.chi2 = after;
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<DivergenceReport> check_initial_diffusion_w2(const DiagGaussian& p, const std::vector<double>& deltas) {
  p.validate();
  const double m2 = (p.mean.array().square() + p.var.array()).sum();
  const double c5 = std::sqrt(m2 + 2.0 * static_cast<double>(p.dim()));
  std::vector<DivergenceReport> out;
  for (double delta : deltas) {
    const double w2 = w2_gaussian(p, ou_gaussian_marginal(p, delta));
    auto r = make_report("w2_initial_diffusion[delta=" + std::to_string(delta) + "]", w2, c5 * std::sqrt(delta), 1e-12);
    r.w2 = w2;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<DivergenceReport> check_initial_diffusion_w2(const Samples& p, const std::vector<double>& deltas,
                                                         Rng& rng) {
  if (p.cols() == 0) throw ValidationError("check_initial_diffusion_w2: empty sample set");
  const double m2 = p.colwise().squaredNorm().mean();
  const double c5 = std::sqrt(m2 + 2.0 * static_cast<double>(p.rows()));
  std::vector<DivergenceReport> out;
  for (double delta : deltas) {
    const Samples noise = standard_normal(p.rows(), p.cols(), rng);
    const Samples moved = std::exp(-delta) * p + std::sqrt(-std::expm1(-2.0 * delta)) * noise;
    const double coupling_cost = std::sqrt((moved - p).colwise().squaredNorm().mean());
    auto r = make_report("w2_initial_diffusion_empirical[delta=" + std::to_string(delta) + "]", coupling_cost,
                         c5 * std::sqrt(delta), 1e-12);
    r.w2 = coupling_cost;
    out.push_back(std::move(r));
  }
  return out;
}

DivergenceReport check_bidirectional_dpi(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const DiagGaussian& p,
                                         const DiagGaussian& q, double tolerance) {
  check_pair(p, q);
  const DiagGaussian tp = affine_pushforward(p, a, b);
  const DiagGaussian tq = affine_pushforward(q, a, b);
  const double kl = kl_gaussian(p, q);
  double err = std::abs(kl_gaussian(tp, tq) - kl);
  std::optional<double> chi2;
  if (((2.0 * q.var.array() - p.var.array()) > 0.0).all()) {
    chi2 = chi2_gaussian(p, q);
    err = std::max(err, std::abs(chi2_gaussian(tp, tq) - *chi2));
  }
  auto r = make_report("bidirectional_dpi", err, 0.0, tolerance);
  r.kl = kl;
  r.chi2 = chi2;
  return r;
}

DivergenceReport check_kl_le_chi2(const DiagGaussian& p, const DiagGaussian& q) {
  const double kl = kl_gaussian(p, q);
  const double chi2 = chi2_gaussian(p, q);
  auto r = make_report("kl_le_chi2", kl, chi2, 1e-12);
  r.kl = kl;
  r.chi2 = chi2;
  return r;
}

std::vector<DivergenceReport> run_verify_suite() {
  std::vector<DivergenceReport> out;
  const DiagGaussian q2 = DiagGaussian::standard(2);

  // OU semigroup on a grid of (s, t).
  {
    const DiagGaussian g{Eigen::Vector2d(1.5, -0.7), Eigen::Vector2d(4.0, 0.3)};
    double worst = 0.0;
    for (double s : {0.0, 0.05, 0.3, 1.0, 2.5}) {
      for (double t : {0.0, 0.1, 0.7, 1.5}) {
        const auto two = ou_gaussian_marginal(ou_gaussian_marginal(g, s), t);
        const auto one = ou_gaussian_marginal(g, s + t);
        worst = std::max({worst, (two.mean - one.mean).cwiseAbs().maxCoeff(), (two.var - one.var).cwiseAbs().maxCoeff()});
      }
    }
    out.push_back(make_report("ou_semigroup", worst, 0.0, 1e-12));
  }

  // chi^2 contraction on a 10 x 10 grid of (|m|, gamma).
  std::vector<Eigen::VectorXd> means;
  std::vector<double> gammas;
  for (int i = 0; i < 10; ++i) {
    means.push_back(Eigen::Vector2d(0.15 * i, -0.05 * i));
    gammas.push_back(0.1 * (i + 1));
  }
  {
    const auto grid = check_ou_contraction(means, gammas);
    double worst = -1e300;
    int violations = 0;
    for (const auto& r : grid) {
      worst = std::max(worst, r.measured - r.bound_rhs);
      violations += r.passed ? 0 : 1;
    }
    auto r = make_report("ou_contraction_grid_10x10", worst, 0.0, 1e-12);
    r.passed = violations == 0;
    out.push_back(std::move(r));
  }
  {
    auto r = check_ou_contraction({Eigen::Vector2d(1.0, 0.0)}, {0.5}).front();
    r.name = "ou_contraction_m1_gamma0.5";
    out.push_back(std::move(r));
    const auto id = check_ou_contraction({Eigen::Vector2d(1.0, 0.0)}, {0.0}).front();
    out.push_back(make_report("ou_contraction_identity_step", std::abs(id.measured - id.bound_rhs), 0.0, 1e-12));
  }

  // KL <= chi^2 on the same grid of means and on scaled variances.
  {
    double worst = -1e300;
    bool ok = true;
    for (const auto& m : means) {
      for (double v : {0.6, 1.0, 1.5}) {
        const auto r = check_kl_le_chi2({m, Eigen::Vector2d::Constant(v)}, q2);
        worst = std::max(worst, r.measured - r.bound_rhs);
        ok = ok && r.passed;
      }
    }
    auto r = make_report("kl_le_chi2_grid", worst, 0.0, 1e-12);
    r.passed = ok;
    out.push_back(std::move(r));
  }

  // Invariance of f-divergences under invertible affine maps.
  {
    auto r = check_bidirectional_dpi(Eigen::Vector2d::Ones(), Eigen::Vector2d(3.0, -1.0),
                                      {Eigen::Vector2d(0.5, 0.2), Eigen::Vector2d(1.2, 0.8)}, q2);
    r.name = "dpi_translation";
    out.push_back(std::move(r));
    r = check_bidirectional_dpi(Eigen::Vector2d::Constant(2.0), Eigen::Vector2d::Zero(), q2,
                                {Eigen::Vector2d::Zero(), Eigen::Vector2d::Constant(2.0)});
    r.name = "dpi_scale_2I";
    out.push_back(std::move(r));
    r = check_bidirectional_dpi(Eigen::Vector2d(1.0, 3.0), Eigen::Vector2d(0.1, -0.4),
                                {Eigen::Vector2d(0.3, -0.6), Eigen::Vector2d(0.9, 1.3)},
                                {Eigen::Vector2d(-0.2, 0.1), Eigen::Vector2d(1.1, 0.8)});
    r.name = "dpi_diag_1_3";
    out.push_back(std::move(r));
  }

  // W2 bound after a short initial diffusion.
  for (auto& r : check_initial_diffusion_w2(q2, {0.01, 0.05, 0.1, 0.2, 0.25, 0.3, 0.4, 0.5})) out.push_back(std::move(r));
  for (auto& r : check_initial_diffusion_w2({Eigen::Vector2d(1.0, -2.0), Eigen::Vector2d(0.25, 3.0)}, {0.01, 0.1, 0.5})) {
    r.name = "w2_initial_diffusion_shifted" + r.name.substr(r.name.find('['));
    out.push_back(std::move(r));
  }

  // Closed forms against known values.
  {
    const double chi2 = chi2_gaussian({Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d::Ones()}, q2);
    out.push_back(make_report("chi2_unit_shift_equals_e_minus_1", std::abs(chi2 - std::expm1(1.0)), 0.0, 1e-12));
    const double w2 = w2_gaussian(q2, {Eigen::Vector2d(3.0, 4.0), Eigen::Vector2d::Ones()});
    out.push_back(make_report("w2_translation_equals_norm", std::abs(w2 - 5.0), 0.0, 1e-12));
    const double kl = kl_gaussian({Eigen::Vector2d(0.6, 0.8), Eigen::Vector2d::Ones()}, q2);
    out.push_back(make_report("kl_unit_variance_shift", std::abs(kl - 0.5), 0.0, 1e-12));
  }
  return out;
}

}  // namespace lfm
