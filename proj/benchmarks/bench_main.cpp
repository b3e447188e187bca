#include "dgap/gap_analyzer.hpp"
#include "dgap/gaussian.hpp"
#include "dgap/grid_manifest.hpp"
#include "dgap/pool_analyzer.hpp"
#include "dgap/selection.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

dgap::FeatureSet random_features(std::size_t n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  dgap::RowMatrix rows(static_cast<Eigen::Index>(n), d);
  for (Eigen::Index r = 0; r < rows.rows(); ++r)
    for (int c = 0; c < d; ++c) rows(r, c) = normal(rng) * (1.0 + c % 3);
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.push_back("s" + std::to_string(i));
  return dgap::FeatureSet(std::move(ids), std::move(rows));
}

void BM_Fit(benchmark::State& state) {
  const auto data = random_features(10000, static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(dgap::fit_gaussian(data));
}
BENCHMARK(BM_Fit)->Arg(8)->Arg(64)->Arg(256);

void BM_DistributionGap(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto model = dgap::fit_gaussian(random_features(5000, d, 2));
  const auto test = random_features(20000, d, 3);
  const auto threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(dgap::distribution_gap(model, test, threads));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(test.size()));
}
BENCHMARK(BM_DistributionGap)->UseRealTime()->Args({64, 1})->Args({64, 4})->Args({256, 1})->Args({256, 4});

void BM_Density(benchmark::State& state) {
  const auto grid = dgap::archangel_grid();
  const auto pairs = dgap::adjacency_pairs(grid);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < grid.combination_count(); ++i) ids.push_back(grid.id_at(i));
  const auto random = random_features(ids.size(), 64, 4);
  const dgap::FeatureSet pool(ids, random.rows());
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dgap::density(pool, pairs, threads));
}
BENCHMARK(BM_Density)->UseRealTime()->Arg(1)->Arg(4);

void BM_GapWeightedSelection(benchmark::State& state) {
  std::vector<dgap::SampleGap> pool;
  std::mt19937_64 rng(5);
  std::chi_squared_distribution<double> chi(16.0);
  for (int i = 0; i < state.range(0); ++i) pool.push_back({"p" + std::to_string(i), chi(rng)});
  dgap::SelectionConfig config{static_cast<std::size_t>(state.range(0) / 10), dgap::SelectionMode::kGapWeighted, 4.0, 0};
  for (auto _ : state) {
    ++config.seed;
    benchmark::DoNotOptimize(dgap::select_indices(pool, config));
  }
}
BENCHMARK(BM_GapWeightedSelection)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
