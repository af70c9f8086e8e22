// Serial references against the OpenMP kernels on gasket-shaped inputs.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "gasket/eigenbasis.hpp"

using namespace gasket;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Matrix a(rows, cols);
  for (double& x : a.data()) x = gauss(rng);
  return a;
}

// Eigenvectors and measure weights of a level; the compression Gram kernel
// multiplies exactly these.
struct GramInput {
  Matrix vectors;
  std::vector<double> weights;
};

const GramInput& gram_input(int m) {
  static std::vector<std::unique_ptr<GramInput>> cache(8);
  if (!cache[m]) {
    const auto ls = build_level_spectrum(m);
    cache[m] = std::make_unique<GramInput>(
        GramInput{basis_up_to(ls.bundles, INFINITY).vectors, ls.level.measure.interior_weights(ls.level.vertices)});
  }
  return *cache[m];
}

void BM_WeightedGramSerial(benchmark::State& state) {
  const auto& in = gram_input(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::weighted_gram_serial(in.vectors, in.weights, in.vectors));
}

void BM_WeightedGramParallel(benchmark::State& state) {
  const auto& in = gram_input(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::weighted_gram(in.vectors, in.weights, in.vectors));
}

void BM_MultiplySerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_matrix(n, n, 1), b = random_matrix(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::multiply_serial(a, b));
}

void BM_MultiplyParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_matrix(n, n, 1), b = random_matrix(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::multiply(a, b));
}

void BM_JacobiSerial(benchmark::State& state) {
  const auto lap = build_dirichlet_laplacian(static_cast<int>(state.range(0)), false);
  for (auto _ : state) benchmark::DoNotOptimize(jacobi_serial(lap.matrix));
}

void BM_JacobiParallel(benchmark::State& state) {
  const auto lap = build_dirichlet_laplacian(static_cast<int>(state.range(0)), false);
  for (auto _ : state) benchmark::DoNotOptimize(jacobi_parallel(lap.matrix));
}

}  // namespace

BENCHMARK(BM_WeightedGramSerial)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WeightedGramParallel)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultiplySerial)->Arg(128)->Arg(363)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultiplyParallel)->Arg(128)->Arg(363)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_JacobiSerial)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_JacobiParallel)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
