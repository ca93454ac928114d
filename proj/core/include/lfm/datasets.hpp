// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lfm/random.hpp"

namespace lfm {

/// Isotropic Gaussian mixture with a shared standard deviation.
struct GaussianMixture {
  Eigen::VectorXd weights;  // on the simplex
  Samples means;            // d x K, one column per component
  double sigma = 1.0;

  Eigen::Index dim() const { return means.rows(); }
  void validate() const;
};

/// `k` equally weighted components evenly spaced on a circle of `radius`.
GaussianMixture circle_mixture(int k, double radius, double sigma);

Samples sample_mixture(const GaussianMixture& gm, Eigen::Index n, Rng& rng);

/// Exact log-density (log-sum-exp over components).
double mixture_logpdf(const GaussianMixture& gm, const Eigen::VectorXd& x);
Eigen::VectorXd mixture_logpdf(const GaussianMixture& gm, const Samples& xs);

/// Polar rose r = cos(k theta), theta ~ U[0, 2 pi), plus isotropic N(0, sigma^2) noise.
Samples sample_rose(Eigen::Index n, int petals, double sigma, Rng& rng);

/// Uniform on the 8 occupied unit cells of a 4 x 4 checkerboard over [-2, 2]^2.
/// Cell (i, j), lower corner (-2 + i, -2 + j), is occupied when i + j is even.
Samples sample_checkerboard(Eigen::Index n, Rng& rng);

/// Parsed numeric CSV, rows as samples.
struct CsvTable {
  std::vector<std::string> header;
  Samples data;  // d x n
};

/// Comma-separated, UTF-8, optional single header row, '.' decimal point, no quoting.
/// Blank lines (including a trailing newline) are skipped; a leading UTF-8 BOM is ignored.
CsvTable parse_csv(std::string_view text, bool has_header);
CsvTable read_csv(const std::filesystem::path& path, bool has_header);

/// Writes one sample per row with 17 significant digits.
void write_csv(std::ostream& os, const Samples& xs, const std::vector<std::string>& header = {});
void write_csv(const std::filesystem::path& path, const Samples& xs, const std::vector<std::string>& header = {});

struct TabularSet {
  std::string name;
  std::vector<std::string> columns;
  Samples train;  // standardized
  Samples test;   // standardized with the train statistics
  Eigen::VectorXd column_means;
  Eigen::VectorXd column_stds;
  std::vector<Eigen::Index> train_indices;  // row indices into the file, in split order
  std::vector<Eigen::Index> test_indices;
  std::uint64_t split_seed = 0;
  double test_fraction = 0.0;

  Samples standardize(const Samples& raw) const;
  Samples destandardize(const Samples& z) const;
};

/// Deterministic shuffled split then standardization by train-split mean and
/// (population) standard deviation. A constant train column is a ValidationError.
TabularSet make_tabular(std::string name, const CsvTable& table, double test_fraction, std::uint64_t seed);
TabularSet load_csv(const std::filesystem::path& path, bool has_header, double test_fraction, std::uint64_t seed);

}  // namespace lfm
