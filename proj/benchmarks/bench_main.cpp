#include <benchmark/benchmark.h>

#include "ssma/alignment.hpp"
#include "ssma/generalized_eigen.hpp"
#include "ssma/graphs.hpp"
#include "ssma/random.hpp"
#include "ssma/sampling.hpp"
#include "ssma/synth.hpp"

namespace {

Eigen::MatrixXd gaussian(ssma::Index rows, ssma::Index cols, std::uint64_t seed) {
  ssma::Rng rng(seed);
  Eigen::MatrixXd x(rows, cols);
  for (ssma::Index j = 0; j < cols; ++j)
    for (ssma::Index i = 0; i < rows; ++i) x(i, j) = rng.normal();
  return x;
}

void BM_KnnGraph(benchmark::State& state) {
  const Eigen::MatrixXd x = gaussian(4, state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(ssma::knn_graph(x, 9));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KnnGraph)->RangeMultiplier(2)->Range(128, 2048)->Complexity();

void BM_SolveGeneralized(benchmark::State& state) {
  const auto d = state.range(0);
  const Eigen::MatrixXd g = gaussian(d, 2 * d, 2), h = gaussian(d, 2 * d, 3);
  const Eigen::MatrixXd a = g * g.transpose();
  const Eigen::MatrixXd b = h * h.transpose() + Eigen::MatrixXd::Identity(d, d);
  for (auto _ : state) benchmark::DoNotOptimize(ssma::solve_generalized(a, b));
}
BENCHMARK(BM_SolveGeneralized)->RangeMultiplier(2)->Range(4, 256);

void BM_FitToy(benchmark::State& state) {
  const auto ds = ssma::make_spiral_pair(state.range(0), 3, ssma::toy_setting("sr"), 4);
  for (auto _ : state) benchmark::DoNotOptimize(ssma::fit(ds, ssma::AlignmentParams{}));
}
BENCHMARK(BM_FitToy)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_BisectingKmeans(benchmark::State& state) {
  const Eigen::MatrixXd x = gaussian(4, 2000, 5);
  for (auto _ : state) benchmark::DoNotOptimize(ssma::bisecting_kmeans(x, state.range(0), 7));
}
BENCHMARK(BM_BisectingKmeans)->Arg(10)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
