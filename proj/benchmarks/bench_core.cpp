// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <vector>

#include "lfm/fmtrain.hpp"
#include "lfm/netcore.hpp"
#include "lfm/odeint.hpp"

namespace {

lfm::VelocityField make_field(int d, int width, int layers) {
  lfm::MlpSpec spec{d, std::vector<int>(static_cast<std::size_t>(layers), width), lfm::Activation::softplus, {}};
  lfm::Rng rng(7);
  return lfm::VelocityField::glorot(spec, rng);
}

void BM_Forward(benchmark::State& state) {
  const auto field = make_field(2, static_cast<int>(state.range(0)), 3);
  lfm::Rng rng(1);
  const lfm::Samples x = lfm::standard_normal(2, 512, rng);
  for (auto _ : state) benchmark::DoNotOptimize(lfm::forward_batch(field, x, 0.5));
  state.SetItemsProcessed(state.iterations() * x.cols());
}
BENCHMARK(BM_Forward)->Arg(64)->Arg(128)->Arg(256);

void BM_LossAndGrad(benchmark::State& state) {
  const auto field = make_field(2, static_cast<int>(state.range(0)), 3);
  lfm::Rng rng(2);
  const lfm::Samples x = lfm::standard_normal(2, 512, rng);
  const lfm::Samples target = lfm::standard_normal(2, 512, rng);
  const std::vector<double> t(512, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(lfm::loss_and_grad(field, x, t, target));
  state.SetItemsProcessed(state.iterations() * x.cols());
}
BENCHMARK(BM_LossAndGrad)->Arg(64)->Arg(128)->Arg(256);

void BM_ForwardWithTrace(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto field = make_field(d, 128, 3);
  lfm::Rng rng(3);
  const lfm::Samples x = lfm::standard_normal(d, 512, rng);
  for (auto _ : state) benchmark::DoNotOptimize(lfm::forward_with_trace(field, x, 0.5));
  state.SetItemsProcessed(state.iterations() * x.cols());
}
BENCHMARK(BM_ForwardWithTrace)->Arg(2)->Arg(8)->Arg(43);

void BM_IntegrateRk4(benchmark::State& state) {
  const auto field = make_field(2, 64, 3);
  lfm::Rng rng(4);
  const lfm::Samples x = lfm::standard_normal(2, 1024, rng);
  const lfm::IntegratorConfig cfg{lfm::Scheme::rk4, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(lfm::integrate(field, x, lfm::Direction::forward, cfg));
  state.SetItemsProcessed(state.iterations() * x.cols());
}
BENCHMARK(BM_IntegrateRk4)->Arg(20)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
