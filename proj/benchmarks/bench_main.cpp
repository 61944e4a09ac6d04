#include <benchmark/benchmark.h>

#include <vector>

#include "corf/codata_model.hpp"
#include "corf/forest.hpp"
#include "corf/log.hpp"
#include "corf/metrics.hpp"
#include "corf/random.hpp"
#include "corf/split.hpp"
#include "corf/synthetic.hpp"

namespace {

using namespace corf;

void BM_FindBestSplit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  std::vector<double> x(n);
  std::vector<std::uint8_t> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.normal();
    y[i] = rng.bernoulli(0.5);
  }
  for (auto _ : state) benchmark::DoNotOptimize(find_best_split(x, y));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_FindBestSplit)->Arg(150)->Arg(1000)->Arg(10000);

void BM_KendallTau(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = rng.normal();
    b[i] = a[i] + rng.normal();
  }
  for (auto _ : state) benchmark::DoNotOptimize(kendall_tau(a, b));
}
BENCHMARK(BM_KendallTau)->Arg(1000)->Arg(100000);

void BM_FitForest(benchmark::State& state) {
  SyntheticSpec spec;
  spec.p = static_cast<std::size_t>(state.range(0));
  spec.n_informative = spec.p / 20;
  const auto s = generate_synthetic(spec);
  ForestParams params;
  params.ntree = 200;
  params.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(fit_forest(s.data, params));
}
BENCHMARK(BM_FitForest)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_FitCoDataModel(benchmark::State& state) {
  const auto s = generate_synthetic(SyntheticSpec{});
  ForestParams params;
  params.ntree = 500;
  const auto base = fit_forest(s.data, params);
  WarningCapture quiet;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_codata_model(base.split_counts(), base.total_splits(), s.codata));
  }
}
BENCHMARK(BM_FitCoDataModel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
