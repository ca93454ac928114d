// SPDX-License-Identifier: Apache-2.0
#include "lfm/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "lfm/error.hpp"

namespace lfm {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

void GaussianMixture::validate() const {
  if (weights.size() == 0 || weights.size() != means.cols()) {
    throw ValidationError("mixture: weights and means must describe the same non-zero number of components");
  }
  if ((weights.array() <= 0.0).any()) throw ValidationError("mixture: weights must be positive");
  if (std::abs(weights.sum() - 1.0) > 1e-12) throw ValidationError("mixture: weights must sum to 1");
  if (!(sigma > 0.0)) throw ValidationError("mixture: sigma must be positive");
}

GaussianMixture circle_mixture(int k, double radius, double sigma) {
  if (k < 1) throw ValidationError("circle_mixture: need at least one component");
  GaussianMixture gm;
  gm.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
  gm.means.resize(2, k);
  for (int i = 0; i < k; ++i) {
    const double angle = 2.0 * std::numbers::pi * i / k;
    gm.means(0, i) = radius * std::cos(angle);
    gm.means(1, i) = radius * std::sin(angle);
  }
  gm.sigma = sigma;
  gm.validate();
  return gm;
}

Samples sample_mixture(const GaussianMixture& gm, Eigen::Index n, Rng& rng) {
  gm.validate();
  std::discrete_distribution<Eigen::Index> pick(gm.weights.data(), gm.weights.data() + gm.weights.size());
  std::normal_distribution<double> normal(0.0, 1.0);
  Samples out(gm.dim(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index c = pick(rng);
    for (Eigen::Index i = 0; i < gm.dim(); ++i) out(i, j) = gm.means(i, c) + gm.sigma * normal(rng);
  }
  return out;
}

double mixture_logpdf(const GaussianMixture& gm, const Eigen::VectorXd& x) {
  if (x.size() != gm.dim()) throw DimensionError("mixture_logpdf input", gm.dim(), x.size());
  const double var = gm.sigma * gm.sigma;
  const double log_norm = -0.5 * static_cast<double>(gm.dim()) * std::log(2.0 * std::numbers::pi * var);
  Eigen::VectorXd terms(gm.weights.size());
  for (Eigen::Index c = 0; c < terms.size(); ++c) {
    terms[c] = std::log(gm.weights[c]) + log_norm - 0.5 * (x - gm.means.col(c)).squaredNorm() / var;
  }
  const double top = terms.maxCoeff();
  return top + std::log((terms.array() - top).exp().sum());
}

Eigen::VectorXd mixture_logpdf(const GaussianMixture& gm, const Samples& xs) {
  gm.validate();
  Eigen::VectorXd out(xs.cols());
  for (Eigen::Index j = 0; j < xs.cols(); ++j) out[j] = mixture_logpdf(gm, Eigen::VectorXd(xs.col(j)));
  return out;
}

Samples sample_rose(Eigen::Index n, int petals, double sigma, Rng& rng) {
  if (petals < 1) throw ValidationError("sample_rose: petals must be >= 1");
  if (sigma < 0.0) throw ValidationError("sample_rose: sigma must be non-negative");
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> normal(0.0, 1.0);
  Samples out(2, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double theta = angle(rng);
    const double r = std::cos(petals * theta);
    out(0, j) = r * std::cos(theta);
    out(1, j) = r * std::sin(theta);
    if (sigma > 0.0) {
      out(0, j) += sigma * normal(rng);
      out(1, j) += sigma * normal(rng);
    }
  }
  return out;
}

Samples sample_checkerboard(Eigen::Index n, Rng& rng) {
  std::uniform_int_distribution<int> cell(0, 7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Samples out(2, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    // Occupied cells: row i in 0..3, and column 2 m + (i mod 2), m in {0, 1}.
    const int c = cell(rng);
    const int i = c / 2;
    const int col = 2 * (c % 2) + (i % 2);
    out(0, j) = -2.0 + col + unit(rng);
    out(1, j) = -2.0 + i + unit(rng);
  }
  return out;
}

CsvTable parse_csv(std::string_view text, bool has_header) {
  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
      static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF) {
    text.remove_prefix(3);
  }
  CsvTable table;
  std::vector<double> values;
  long width = -1;
  long n_rows = 0;
  long row = -1;
  bool header_pending = has_header;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++row;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (header_pending) {
      header_pending = false;
      for (auto f : fields) table.header.emplace_back(f);
      width = static_cast<long>(fields.size());
      continue;
    }
    if (width < 0) width = static_cast<long>(fields.size());
    if (static_cast<long>(fields.size()) != width) {
      throw ParseError("ragged CSV: expected " + std::to_string(width) + " fields, found " +
                           std::to_string(fields.size()),
                       row, -1);
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string_view f = fields[c];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw ParseError("non-numeric CSV field '" + std::string(f) + "'", row, static_cast<long>(c));
      }
      values.push_back(v);
    }
    ++n_rows;
  }
  if (n_rows == 0) throw ParseError("CSV contains no data rows", 0, -1);
  table.data = Eigen::Map<const Eigen::MatrixXd>(values.data(), width, n_rows);
  return table;
}

CsvTable read_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open CSV file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_csv(buffer.str(), has_header);
  } catch (const ParseError& e) {
    // Drop the location suffix; the rethrow appends it again.
    const std::string what = e.what();
    throw ParseError(path.string() + ": " + what.substr(0, what.rfind(" (row ")), e.row(), e.column());
  }
}

void write_csv(std::ostream& os, const Samples& xs, const std::vector<std::string>& header) {
  if (!header.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
  }
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index j = 0; j < xs.cols(); ++j) {
    for (Eigen::Index i = 0; i < xs.rows(); ++i) os << (i ? "," : "") << xs(i, j);
    os << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Samples& xs, const std::vector<std::string>& header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write CSV file '" + path.string() + "'");
  write_csv(out, xs, header);
}

Samples TabularSet::standardize(const Samples& raw) const {
  if (raw.rows() != column_means.size()) throw DimensionError("standardize input", column_means.size(), raw.rows());
  return ((raw.colwise() - column_means).array().colwise() / column_stds.array()).matrix();
}

Samples TabularSet::destandardize(const Samples& z) const {
  if (z.rows() != column_means.size()) throw DimensionError("destandardize input", column_means.size(), z.rows());
  return ((z.array().colwise() * column_stds.array()).matrix().colwise() + column_means);
}

TabularSet make_tabular(std::string name, const CsvTable& table, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw ValidationError("test_fraction must lie in [0, 1), got " + std::to_string(test_fraction));
  }
  const Eigen::Index n = table.data.cols();
  const auto n_test = static_cast<Eigen::Index>(std::llround(test_fraction * static_cast<double>(n)));
  if (n - n_test < 1) throw ValidationError("train split would be empty");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(seed);
  // Fisher-Yates with an explicit distribution so the split only depends on the engine.
  for (Eigen::Index i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<Eigen::Index> pick(0, i);
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(pick(rng))]);
  }

  TabularSet set;
  set.name = std::move(name);
  set.columns = table.header;
  set.split_seed = seed;
  set.test_fraction = test_fraction;
  set.test_indices.assign(order.begin(), order.begin() + n_test);
  set.train_indices.assign(order.begin() + n_test, order.end());

  auto gather = [&](const std::vector<Eigen::Index>& idx) {
    Samples out(table.data.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = table.data.col(idx[j]);
    return out;
  };
  const Samples train_raw = gather(set.train_indices);
  const Samples test_raw = gather(set.test_indices);
  set.column_means = train_raw.rowwise().mean();
  set.column_stds = (train_raw.colwise() - set.column_means).array().square().rowwise().mean().sqrt();
  for (Eigen::Index i = 0; i < set.column_stds.size(); ++i) {
    if (!(set.column_stds[i] > 0.0)) {
      throw ValidationError("column " + std::to_string(i) + " is constant on the train split; cannot standardize");
    }
  }
  set.train = set.standardize(train_raw);
  set.test = set.standardize(test_raw);
  return set;
}

TabularSet load_csv(const std::filesystem::path& path, bool has_header, double test_fraction, std::uint64_t seed) {
  return make_tabular(path.stem().string(), read_csv(path, has_header), test_fraction, seed);
}

}  // namespace lfm
