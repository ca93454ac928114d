// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "lfm/datasets.hpp"
#include "lfm/error.hpp"

namespace {

using lfm::Samples;

TEST(DatasetsTest, SingleComponentLogpdf) {
  for (int d : {1, 2, 5}) {
    lfm::GaussianMixture gm{Eigen::VectorXd::Ones(1), Samples::Zero(d, 1), 1.0};
    EXPECT_NEAR(lfm::mixture_logpdf(gm, Eigen::VectorXd(Eigen::VectorXd::Zero(d))), -0.5 * d * std::log(2 * std::numbers::pi), 1e-14);
  }
}

TEST(DatasetsTest, CircleMixtureLogpdfAtMean) {
  const auto gm = lfm::circle_mixture(8, 1.0, 0.1);
  const double want = std::log(1.0 / 8) - std::log(2 * std::numbers::pi * 0.01);
  EXPECT_NEAR(lfm::mixture_logpdf(gm, Eigen::VectorXd(gm.means.col(3))), want, 1e-8);
  EXPECT_NEAR(want, 0.688, 5e-4);
  EXPECT_NEAR(gm.weights.sum(), 1.0, 1e-12);
  for (Eigen::Index c = 0; c < 8; ++c) EXPECT_NEAR(gm.means.col(c).norm(), 1.0, 1e-15);
}

TEST(DatasetsTest, LogpdfIsStableFarAway) {
  const auto gm = lfm::circle_mixture(8, 1.0, 0.1);
  const double v = lfm::mixture_logpdf(gm, Eigen::VectorXd(Eigen::Vector2d(40.0, 0.0)));
  EXPECT_TRUE(std::isfinite(v));
  // Dominated by the component at (1, 0).
  EXPECT_NEAR(v, std::log(1.0 / 8) - std::log(2 * std::numbers::pi * 0.01) - 0.5 * 39.0 * 39.0 / 0.01, 1e-6);
}

TEST(DatasetsTest, MixtureMeanMatchesWeights) {
  lfm::GaussianMixture gm;
  gm.weights = Eigen::Vector3d(0.2, 0.5, 0.3);
  gm.means.resize(2, 3);
  gm.means << 1.0, -2.0, 0.0, 0.5, 1.0, -1.5;
  gm.sigma = 0.4;
  lfm::Rng rng(1);
  const Samples xs = lfm::sample_mixture(gm, 100000, rng);
  const Eigen::Vector2d want = gm.means * gm.weights;
  // Per-coordinate variance of the mixture bounds the Monte Carlo error.
  for (int i = 0; i < 2; ++i) {
    double second = gm.sigma * gm.sigma;
    for (int c = 0; c < 3; ++c) second += gm.weights[c] * gm.means(i, c) * gm.means(i, c);
    const double sd = std::sqrt((second - want[i] * want[i]) / 1e5);
    EXPECT_NEAR(xs.row(i).mean(), want[i], 3 * sd);
  }
}

double grid_integral(const lfm::GaussianMixture& gm, double lo, double hi, int n,
                     double (*weight)(double, double) = nullptr) {
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Eigen::Vector2d x(lo + (i + 0.5) * h, lo + (j + 0.5) * h);
      const double lp = lfm::mixture_logpdf(gm, Eigen::VectorXd(x));
      s += std::exp(lp) * (weight ? weight(lp, 0.0) : 1.0);
    }
  }
  return s * h * h;
}

TEST(DatasetsTest, LogpdfIntegratesToOne) {
  const auto gm = lfm::circle_mixture(8, 1.0, 0.1);
  EXPECT_NEAR(grid_integral(gm, -2.0, 2.0, 800), 1.0, 1e-3);
  const auto wide = lfm::circle_mixture(3, 2.0, 0.5);
  EXPECT_NEAR(grid_integral(wide, -6.0, 6.0, 600), 1.0, 1e-3);
}

TEST(DatasetsTest, AverageLogpdfMatchesNegativeEntropy) {
  const auto gm = lfm::circle_mixture(8, 1.0, 0.1);
  const double neg_entropy = grid_integral(gm, -2.0, 2.0, 800, [](double lp, double) { return lp; });
  lfm::Rng rng(2);
  const Eigen::VectorXd lp = lfm::mixture_logpdf(gm, lfm::sample_mixture(gm, 100000, rng));
  const double sd = std::sqrt((lp.array() - lp.mean()).square().mean() / 1e5);
  EXPECT_NEAR(lp.mean(), neg_entropy, 3 * sd);
}

TEST(DatasetsTest, MixtureValidation) {
  lfm::GaussianMixture gm{Eigen::Vector2d(0.5, 0.6), Samples::Zero(2, 2), 1.0};
  EXPECT_THROW(gm.validate(), lfm::ValidationError);
  gm.weights = Eigen::Vector2d(1.0, 0.0);
  EXPECT_THROW(gm.validate(), lfm::ValidationError);
  gm.weights = Eigen::Vector2d(0.5, 0.5);
  gm.sigma = 0.0;
  EXPECT_THROW(gm.validate(), lfm::ValidationError);
  EXPECT_THROW(lfm::mixture_logpdf(lfm::circle_mixture(2, 1, 1), Eigen::VectorXd(Eigen::VectorXd::Zero(3))), lfm::DimensionError);
}

TEST(DatasetsTest, RoseOnCurveWithoutNoise) {
  lfm::Rng rng(3);
  const Samples xs = lfm::sample_rose(5000, 4, 0.0, rng);
  for (Eigen::Index j = 0; j < xs.cols(); ++j) {
    const double th = std::atan2(xs(1, j), xs(0, j));
    EXPECT_LT(std::abs(xs.col(j).norm() - std::abs(std::cos(4 * th))), 1e-9);
  }
}

TEST(DatasetsTest, RoseHasEightLobes) {
  lfm::Rng rng(4);
  const Samples xs = lfm::sample_rose(100000, 4, 0.02, rng);
  constexpr int kBins = 64;
  std::array<int, kBins> hist{};
  for (Eigen::Index j = 0; j < xs.cols(); ++j) {
    if (xs.col(j).norm() < 0.3) continue;  // the centre carries no angular information
    const double a = std::atan2(xs(1, j), xs(0, j)) + std::numbers::pi;
    ++hist[static_cast<std::size_t>(std::min(kBins - 1, static_cast<int>(a / (2 * std::numbers::pi) * kBins)))];
  }
  // Circular local maxima after a 3-bin moving average.
  std::array<double, kBins> smooth{};
  for (int b = 0; b < kBins; ++b) {
    smooth[b] = (hist[(b + kBins - 1) % kBins] + hist[b] + hist[(b + 1) % kBins]) / 3.0;
  }
  const double peak = *std::max_element(smooth.begin(), smooth.end());
  int modes = 0;
  for (int b = 0; b < kBins; ++b) {
    const double l = smooth[(b + kBins - 1) % kBins];
    const double r = smooth[(b + 1) % kBins];
    if (smooth[b] > l && smooth[b] >= r && smooth[b] > 0.5 * peak) ++modes;
  }
  EXPECT_EQ(modes, 8);
}

TEST(DatasetsTest, RoseBounded) {
  lfm::Rng rng(5);
  const Samples xs = lfm::sample_rose(100000, 4, 0.02, rng);
  EXPECT_LE(xs.colwise().norm().maxCoeff(), 1.0 + 6 * 0.02);
}

TEST(DatasetsTest, CheckerboardCells) {
  lfm::Rng rng(6);
  const Eigen::Index n = 100000;
  const Samples xs = lfm::sample_checkerboard(n, rng);
  std::array<std::array<long, 4>, 4> counts{};
  for (Eigen::Index j = 0; j < n; ++j) {
    ASSERT_GE(xs(0, j), -2.0);
    ASSERT_LE(xs(0, j), 2.0);
    ASSERT_GE(xs(1, j), -2.0);
    ASSERT_LE(xs(1, j), 2.0);
    const int i = std::min(3, static_cast<int>(std::floor(xs(0, j) + 2.0)));
    const int k = std::min(3, static_cast<int>(std::floor(xs(1, j) + 2.0)));
    ++counts[i][k];
  }
  const double p = 1.0 / 8;
  const double sd = std::sqrt(static_cast<double>(n) * p * (1 - p));
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) {
      if ((i + k) % 2 == 0) {
        EXPECT_NEAR(static_cast<double>(counts[i][k]), static_cast<double>(n) * p, 4 * sd) << i << "," << k;
      } else {
        EXPECT_EQ(counts[i][k], 0) << i << "," << k;
      }
    }
  }
}

TEST(DatasetsTest, SamplersAreDeterministic) {
  lfm::Rng a(7), b(7);
  EXPECT_EQ(lfm::sample_rose(100, 3, 0.1, a), lfm::sample_rose(100, 3, 0.1, b));
  EXPECT_EQ(lfm::sample_checkerboard(100, a), lfm::sample_checkerboard(100, b));
  const auto gm = lfm::circle_mixture(5, 1.0, 0.2);
  EXPECT_EQ(lfm::sample_mixture(gm, 100, a), lfm::sample_mixture(gm, 100, b));
}

TEST(DatasetsTest, ParseHandWrittenCsv) {
  const auto t = lfm::parse_csv("a,b\n1,2.5\n-3,4e-1\n0.125, 7\n", true);
  ASSERT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
  Samples want(2, 3);
  want << 1, -3, 0.125, 2.5, 0.4, 7;
  EXPECT_EQ(t.data, want);
  const auto bare = lfm::parse_csv("\xEF\xBB\xBF" "1,2\r\n\r\n3,4", false);
  EXPECT_TRUE(bare.header.empty());
  EXPECT_EQ(bare.data, (Samples(2, 2) << 1, 3, 2, 4).finished());
}

TEST(DatasetsTest, CsvErrorsCarryLocation) {
  try {
    lfm::parse_csv("x,y\n1,2\n3\n", true);
    FAIL();
  } catch (const lfm::ParseError& e) {
    EXPECT_EQ(e.row(), 2);
    EXPECT_EQ(e.column(), -1);
  }
  try {
    lfm::parse_csv("1,2\n3,abc\n", false);
    FAIL();
  } catch (const lfm::ParseError& e) {
    EXPECT_EQ(e.row(), 1);
    EXPECT_EQ(e.column(), 1);
    EXPECT_NE(std::string(e.what()).find("column 1"), std::string::npos);
  }
  EXPECT_THROW(lfm::parse_csv("", false), lfm::ParseError);
  EXPECT_THROW(lfm::parse_csv("a,b\n", true), lfm::ParseError);
  EXPECT_THROW(lfm::parse_csv("1,,2\n", false), lfm::ParseError);
  EXPECT_THROW(lfm::parse_csv("\"1\",2\n", false), lfm::ParseError);
}

TEST(DatasetsTest, CsvFileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "lfm_datasets_test.csv";
  lfm::Rng rng(8);
  const Samples xs = lfm::standard_normal(3, 20, rng);
  lfm::write_csv(path, xs, {"p", "q", "r"});
  const auto t = lfm::read_csv(path, true);
  EXPECT_EQ(t.data, xs);
  EXPECT_EQ(t.header.size(), 3u);
  {
    std::ofstream bad(path);
    bad << "1,2\n3,x\n";
  }
  try {
    lfm::read_csv(path, false);
    FAIL();
  } catch (const lfm::ParseError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find(path.string()), std::string::npos);
    EXPECT_EQ(what.find("(row"), what.rfind("(row")) << what;
  }
  std::filesystem::remove(path);
  EXPECT_THROW(lfm::read_csv(path, false), lfm::ValidationError);
}

lfm::CsvTable random_table(Eigen::Index d, Eigen::Index n, std::uint64_t seed) {
  lfm::Rng rng(seed);
  lfm::CsvTable t;
  t.data = 3.0 * lfm::standard_normal(d, n, rng);
  t.data.colwise() += Eigen::VectorXd::LinSpaced(d, -5.0, 5.0);
  return t;
}

TEST(DatasetsTest, StandardizedTrainSplit) {
  const auto set = lfm::make_tabular("t", random_table(4, 1000, 9), 0.1, 10);
  EXPECT_EQ(set.train.cols(), 900);
  EXPECT_EQ(set.test.cols(), 100);
  for (Eigen::Index i = 0; i < 4; ++i) {
    const auto row = set.train.row(i).array();
    EXPECT_NEAR(row.mean(), 0.0, 1e-9);
    EXPECT_NEAR(std::sqrt((row - row.mean()).square().mean()), 1.0, 1e-9);
  }
}

TEST(DatasetsTest, StandardizeRoundTrip) {
  const auto table = random_table(3, 200, 11);
  const auto set = lfm::make_tabular("t", table, 0.2, 12);
  EXPECT_LT((set.destandardize(set.standardize(table.data)) - table.data).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(set.standardize(Samples::Zero(2, 3)), lfm::DimensionError);
}

TEST(DatasetsTest, SplitIsDeterministic) {
  const auto table = random_table(2, 300, 13);
  const auto a = lfm::make_tabular("t", table, 0.25, 14);
  const auto b = lfm::make_tabular("t", table, 0.25, 14);
  const auto c = lfm::make_tabular("t", table, 0.25, 15);
  EXPECT_EQ(a.train_indices, b.train_indices);
  EXPECT_EQ(a.test_indices, b.test_indices);
  EXPECT_NE(a.test_indices, c.test_indices);
  // The two index lists partition the rows.
  std::vector<Eigen::Index> all = a.train_indices;
  all.insert(all.end(), a.test_indices.begin(), a.test_indices.end());
  std::sort(all.begin(), all.end());
  for (Eigen::Index i = 0; i < 300; ++i) EXPECT_EQ(all[static_cast<std::size_t>(i)], i);
}

TEST(DatasetsTest, TabularErrors) {
  lfm::CsvTable t;
  t.data = Samples::Ones(2, 10);
  t.data.row(0) = Eigen::RowVectorXd::LinSpaced(10, 0, 1);
  EXPECT_THROW(lfm::make_tabular("t", t, 0.1, 1), lfm::ValidationError);
  t.data.row(1) = Eigen::RowVectorXd::LinSpaced(10, 1, 2);
  EXPECT_THROW(lfm::make_tabular("t", t, 1.0, 1), lfm::ValidationError);
  EXPECT_THROW(lfm::make_tabular("t", t, -0.1, 1), lfm::ValidationError);
}

}  // namespace
