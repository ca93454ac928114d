// SPDX-License-Identifier: Apache-2.0
#include "lfm/runner.hpp"

#include <fstream>
#include <iomanip>
#include <limits>

#include "lfm/error.hpp"

namespace lfm {
namespace {

Samples synthetic(const RunConfig& cfg, Eigen::Index n, Rng& rng) {
  const DatasetConfig& d = cfg.dataset;
  switch (d.kind) {
    case DatasetKind::rose: return sample_rose(n, d.rose_petals, d.rose_noise, rng);
    case DatasetKind::checkerboard: return sample_checkerboard(n, rng);
    case DatasetKind::mixture:
      return sample_mixture(circle_mixture(d.mixture_components, d.mixture_radius, d.mixture_sigma), n, rng);
    case DatasetKind::gaussian: {
      const Eigen::Map<const Eigen::VectorXd> mean(d.gaussian_mean.data(),
                                                   static_cast<Eigen::Index>(d.gaussian_mean.size()));
      Samples x = standard_normal(mean.size(), n, rng);
      x.colwise() += mean;
      return x;
    }
    case DatasetKind::csv: break;
  }
  throw ValidationError("dataset is not synthetic");
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

}  // namespace

DataSplit load_dataset(const RunConfig& cfg) {
  cfg.validate();
  DataSplit split;
  if (cfg.dataset.kind == DatasetKind::csv) {
    const TabularSet set = load_csv(cfg.dataset.csv_path, cfg.dataset.csv_header, cfg.dataset.test_fraction,
                                    derive_seed(cfg.seed, streams::split));
    split.train = set.train;
    split.test = set.test;
  } else {
    Rng train_rng = make_rng(cfg.seed, streams::data);
    Rng test_rng = make_rng(cfg.seed, streams::evaluation);
    split.train = synthetic(cfg, cfg.dataset.n_train, train_rng);
    split.test = synthetic(cfg, cfg.dataset.n_test, test_rng);
  }
  if (split.train.rows() != cfg.dataset.expected_dim) {
    throw DimensionError("dataset '" + std::string(to_string(cfg.dataset.kind)) + "' (preset dimension check)",
                         cfg.dataset.expected_dim, split.train.rows());
  }
  return split;
}

TrainOutputs run_train(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);
  const DataSplit data = load_dataset(cfg);
  const Schedule schedule = make_schedule(cfg.schedule_c, cfg.schedule_rho, cfg.n_blocks);
  const TrainedLfm trained = train_lfm(data.train, schedule, cfg.block_config(), cfg.mlp_spec(), cfg.integrator,
                                       LfmTrainOptions{.retain_pools = false});

  TrainOutputs out;
  out.checkpoint = out_dir / "model.lfm";
  out.loss_history = out_dir / "loss_history.csv";
  out.manifest = out_dir / "manifest.txt";
  out.test_data = out_dir / "test.csv";
  save_checkpoint(out.checkpoint, trained.model);

  {
    auto os = open_out(out.loss_history);
    os << "block,batch,loss\n";
    for (std::size_t n = 0; n < trained.loss_histories.size(); ++n) {
      const auto& h = trained.loss_histories[n];
      for (std::size_t b = 0; b < h.size(); ++b) os << n + 1 << ',' << b << ',' << h[b] << '\n';
    }
  }
  write_csv(out.test_data, data.test);

  if (data.test.cols() > 0) out.mean_test_nll = nll(trained.model, data.test).mean();
  {
    auto os = open_out(out.manifest);
    os << "# resolved run configuration\n" << to_text(cfg);
    os << "# results\n";
    for (std::size_t n = 0; n < schedule.gammas.size(); ++n) {
      os << "# gamma_" << n + 1 << " = " << schedule.gammas[n] << '\n';
    }
    os << "# train_points = " << data.train.cols() << '\n';
    os << "# test_points = " << data.test.cols() << '\n';
    if (data.test.cols() > 0) os << "# mean_test_nll = " << out.mean_test_nll << '\n';
  }
  return out;
}

void run_generate(const std::filesystem::path& model_path, long n, std::uint64_t seed,
                  const std::filesystem::path& out_csv, const IntegratorConfig& integrator) {
  if (n < 1) throw ValidationError("--n must be >= 1");
  const AnyModel model = load_checkpoint(model_path, integrator);
  Rng rng = make_rng(seed, streams::generation);
  const Samples xs = std::visit(
      [&](const auto& m) -> Samples {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, LfmModel>) {
          return generate(m, n, rng);
        } else {
          return generate_distilled(m, n, rng);
        }
      },
      model);
  if (!xs.allFinite()) throw NumericalError("generated samples contain non-finite values");
  write_csv(out_csv, xs);
}

double run_nll(const std::filesystem::path& model_path, const std::filesystem::path& data_csv,
               const std::filesystem::path& out_csv, bool has_header, const IntegratorConfig& integrator) {
  const AnyModel model = load_checkpoint(model_path, integrator);
  const auto* lfm = std::get_if<LfmModel>(&model);
  if (lfm == nullptr) {
    throw ValidationError(model_path.string() + ": likelihoods need an invertible LFM checkpoint, not a distilled one");
  }
  const CsvTable table = read_csv(data_csv, has_header);
  if (table.data.rows() != lfm->dim) {
    throw DimensionError(data_csv.string() + ": column count", lfm->dim, table.data.rows());
  }
  const Eigen::VectorXd values = nll(*lfm, table.data);
  auto os = open_out(out_csv);
  os << "nll\n";
  for (Eigen::Index i = 0; i < values.size(); ++i) os << values[i] << '\n';
  const double mean = values.mean();
  os << "mean," << mean << '\n';
  return mean;
}

std::filesystem::path run_distill(const std::filesystem::path& model_path, int k, const DistillConfig& cfg,
                                  const std::filesystem::path& out_dir, const IntegratorConfig& integrator) {
  cfg.validate();
  const AnyModel model = load_checkpoint(model_path, integrator);
  const auto* teacher = std::get_if<LfmModel>(&model);
  if (teacher == nullptr) throw ValidationError(model_path.string() + ": distillation needs an LFM checkpoint");
  ensure_dir(out_dir);

  Rng noise_rng = make_rng(cfg.seed, streams::distillation);
  const auto chain = reverse_chain(*teacher, standard_normal(teacher->dim, cfg.chain_samples, noise_rng));
  BlockTrainConfig block = cfg.block;
  block.seed = derive_seed(cfg.seed, streams::training);
  const DistillResult result = distill(*teacher, chain, k, block, cfg.mlp_spec(teacher->dim));

  const auto path = out_dir / "distilled.lfm";
  save_checkpoint(path, result.model);
  {
    auto os = open_out(out_dir / "distill_loss_history.csv");
    os << "step,batch,loss\n";
    for (std::size_t n = 0; n < result.loss_histories.size(); ++n) {
      const auto& h = result.loss_histories[n];
      for (std::size_t b = 0; b < h.size(); ++b) os << n + 1 << ',' << b << ',' << h[b] << '\n';
    }
  }
  {
    auto os = open_out(out_dir / "distill_manifest.txt");
    os << "# resolved distill configuration\n" << to_text(cfg) << "k = " << k << '\n';
    for (std::size_t n = 0; n < result.initial_loss.size(); ++n) {
      os << "# step_" << n + 1 << " initial_loss = " << result.initial_loss[n]
         << " final_loss = " << result.final_loss[n] << '\n';
    }
  }
  return path;
}

bool run_verify(const std::filesystem::path& out_file, std::vector<DivergenceReport>* reports) {
  auto results = run_verify_suite();
  bool ok = true;
  for (const auto& r : results) ok = ok && r.passed;
  auto os = open_out(out_file);
  os << format_report(results);
  if (reports != nullptr) *reports = std::move(results);
  return ok;
}

}  // namespace lfm
