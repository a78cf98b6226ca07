#include <benchmark/benchmark.h>

#include <vector>

#include "tritree/censor.hpp"
#include "tritree/split.hpp"
#include "tritree/synthetic.hpp"
#include "tritree/tree.hpp"

using namespace tritree;

namespace {

const Dataset& censored_synthetic() {
  static const Dataset ds = censor_mcar(make_synthetic(), 0.3, 1);
  return ds;
}

void BM_Train(benchmark::State& state) {
  const Dataset& ds = censored_synthetic();
  TrainConfig cfg;
  cfg.strategy = all_strategies()[static_cast<std::size_t>(state.range(0))];
  cfg.max_depth = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(train(ds, cfg));
  state.SetLabel(to_string(cfg.strategy));
}
BENCHMARK(BM_Train)->ArgsProduct({{0, 1, 2, 3, 4}, {3, 5}})->Unit(benchmark::kMillisecond);

void BM_BestSplitRoot(benchmark::State& state) {
  const Dataset& ds = censored_synthetic();
  const Strategy strategy = all_strategies()[static_cast<std::size_t>(state.range(0))];
  const RowSet rows = all_rows(ds.n_rows());
  std::vector<std::size_t> features(ds.n_features());
  for (std::size_t j = 0; j < features.size(); ++j) features[j] = j;
  for (auto _ : state) {
    benchmark::DoNotOptimize(best_split(ds, rows, features, strategy, LossKind::sse(), SplitConfig{}));
  }
  state.SetLabel(to_string(strategy));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ds.n_rows()));
}
BENCHMARK(BM_BestSplitRoot)->DenseRange(0, 4)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
