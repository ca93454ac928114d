// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: train, generate, nll, distill, verify, presets.
// Exit codes: 0 success, 1 validation error, 2 runtime/numerical error,
// 3 verify-suite failure.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lfm/error.hpp"
#include "lfm/runner.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;
constexpr int kVerifyFailed = 3;

void add_integrator_options(CLI::App* cmd, std::string& scheme, int& steps) {
  cmd->add_option("--scheme", scheme, "ODE scheme used with the checkpoint (euler|rk4)")->default_val("rk4");
  cmd->add_option("--steps", steps, "ODE steps per block")->default_val(20);
}

lfm::IntegratorConfig integrator_from(const std::string& scheme, int steps) {
  lfm::IntegratorConfig cfg{lfm::parse_scheme(scheme), steps};
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local flow matching: train, sample, score, distill, verify"};
  app.require_subcommand(1);

  std::string config_path, out, model, data, scheme = "rk4";
  long n = 0;
  std::uint64_t seed = 0;
  int k = 1;
  int steps = 20;
  bool header = false;
  bool list = false;

  auto* train = app.add_subcommand("train", "Train an LFM model from a config file");
  train->add_option("--config", config_path, "Config file (key = value)")->required();
  train->add_option("--out", out, "Output directory")->required();

  auto* gen = app.add_subcommand("generate", "Generate samples from a checkpoint");
  gen->add_option("--model", model, "Checkpoint path")->required();
  gen->add_option("--n", n, "Number of samples")->required();
  gen->add_option("--seed", seed, "Noise seed")->required();
  gen->add_option("--out", out, "Output CSV")->required();
  add_integrator_options(gen, scheme, steps);

  auto* score = app.add_subcommand("nll", "Per-sample negative log-likelihood in nats");
  score->add_option("--model", model, "Checkpoint path")->required();
  score->add_option("--data", data, "Input CSV, one sample per row")->required();
  score->add_option("--out", out, "Output CSV")->required();
  score->add_flag("--header", header, "Input CSV has a header row");
  add_integrator_options(score, scheme, steps);

  auto* dist = app.add_subcommand("distill", "Distill an LFM checkpoint into N/k residual steps");
  dist->add_option("--model", model, "Teacher checkpoint")->required();
  dist->add_option("--k", k, "Teacher blocks per distilled step")->required();
  dist->add_option("--config", config_path, "Distillation config file")->required();
  dist->add_option("--out", out, "Output directory")->required();
  add_integrator_options(dist, scheme, steps);

  auto* verify = app.add_subcommand("verify", "Run the closed-form divergence checks");
  verify->add_option("--out", out, "Report file")->required();

  auto* presets = app.add_subcommand("presets", "Show named presets");
  presets->add_flag("--list", list, "List preset names");
  std::string show;
  presets->add_option("--show", show, "Print the resolved config of one preset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*train) {
      const auto outputs = lfm::run_train(lfm::load_run_config(config_path), out);
      std::cout << "wrote " << outputs.checkpoint.string() << "\nmean test NLL " << outputs.mean_test_nll << '\n';
    } else if (*gen) {
      lfm::run_generate(model, n, seed, out, integrator_from(scheme, steps));
    } else if (*score) {
      const double mean = lfm::run_nll(model, data, out, header, integrator_from(scheme, steps));
      std::cout << "mean NLL " << mean << " nats\n";
    } else if (*dist) {
      const auto path = lfm::run_distill(model, k, lfm::load_distill_config(config_path), out,
                                         integrator_from(scheme, steps));
      std::cout << "wrote " << path.string() << '\n';
    } else if (*verify) {
      std::vector<lfm::DivergenceReport> reports;
      const bool ok = lfm::run_verify(out, &reports);
      std::cout << lfm::format_report(reports);
      if (!ok) {
        std::cerr << "verify: one or more checks failed\n";
        return kVerifyFailed;
      }
    } else if (*presets) {
      if (!show.empty()) {
        std::cout << lfm::to_text(lfm::preset(show));
      } else {
        for (const auto& name : lfm::preset_names()) std::cout << name << '\n';
      }
    }
  } catch (const lfm::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const lfm::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
