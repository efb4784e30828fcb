#include <random>

#include <benchmark/benchmark.h>

#include "panelcast/features.hpp"
#include "panelcast/network.hpp"
#include "panelcast/training.hpp"
#include "panelcast/trials.hpp"

using namespace panelcast;

namespace {

Matrix random_sequence(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(5, 10);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = u(rng);
  return m;
}

void BM_NetworkForward(benchmark::State& state) {
  const auto params = init_params(1);
  const auto x = random_sequence(2);
  for (auto _ : state) benchmark::DoNotOptimize(network_forward(params, x, Mode::Eval).prediction);
}
BENCHMARK(BM_NetworkForward);

void BM_NetworkForwardBackward(benchmark::State& state) {
  const auto params = init_params(1);
  const auto x = random_sequence(2);
  for (auto _ : state) {
    const auto fwd = network_forward(params, x, Mode::Train, 3);
    auto grads = network_backward(params, fwd.cache, 0.5);
    benchmark::DoNotOptimize(grads.head.bias);
  }
}
BENCHMARK(BM_NetworkForwardBackward);

void BM_RollingStats(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> d(100.0, 10.0);
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (auto& v : x) v = d(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rolling_mean(x, 3));
    benchmark::DoNotOptimize(rolling_std(x, 4));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RollingStats)->Arg(20)->Arg(1000)->Arg(100000);

void BM_BuildSequences(benchmark::State& state) {
  const auto dataset = synthesize_panel(5, 50, 2000, 20);
  for (auto _ : state) benchmark::DoNotOptimize(build_sequences(dataset).size());
}
BENCHMARK(BM_BuildSequences);

void BM_TrainingEpoch(benchmark::State& state) {
  const auto data = prepare_data(synthesize_panel(7, static_cast<int>(state.range(0)), 2000, 20));
  TrainConfig config;
  config.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train_model(data.scaled, config).log.records.size());
}
BENCHMARK(BM_TrainingEpoch)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
