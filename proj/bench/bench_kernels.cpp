#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "sgpart/kernels.hpp"

using namespace sgp::kernels;

namespace {

BitMatrix random_rows(std::size_t rows, std::size_t cols, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution bit(density);
  BitMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (bit(rng)) m.set(r, c);
  return m;
}

std::vector<double> random_values(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> out(count);
  for (double& x : out) x = normal(rng);
  return out;
}

// Rows = |S|-like sample rows, columns = |R|.
void BM_AndPopcount(benchmark::State& state, Backend backend) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto cols = static_cast<std::size_t>(state.range(1));
  const BitMatrix m = random_rows(rows, cols, 0.3, 1);
  const BitMatrix q = random_rows(1, cols, 0.3, 2);
  std::vector<std::uint32_t> out(rows);
  for (auto _ : state) {
    and_popcount(backend, q.row(0), m, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}

void BM_Nearest(benchmark::State& state, Backend backend) {
  const auto candidates = static_cast<std::size_t>(state.range(0));
  const std::size_t dim = 16;
  const std::vector<double> base = random_values(candidates * dim, 3);
  const std::vector<double> query = random_values(dim, 4);
  for (auto _ : state) {
    auto idx = nearest(backend, query, base, candidates, dim, 5);
    benchmark::DoNotOptimize(idx.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(candidates));
}

void BM_Matmul(benchmark::State& state, Backend backend) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::vector<double> a = random_values(n * n, 5), b = random_values(n * n, 6);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    matmul(backend, a, b, c, n);
    benchmark::DoNotOptimize(c.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_AndPopcount, serial, Backend::Serial)
    ->Args({83, 500})->Args({1000, 1000})->Args({4096, 4096});
BENCHMARK_CAPTURE(BM_AndPopcount, parallel, Backend::Parallel)
    ->Args({83, 500})->Args({1000, 1000})->Args({4096, 4096});
BENCHMARK_CAPTURE(BM_Nearest, serial, Backend::Serial)->Arg(500)->Arg(5000)->Arg(50000);
BENCHMARK_CAPTURE(BM_Nearest, parallel, Backend::Parallel)->Arg(500)->Arg(5000)->Arg(50000);
BENCHMARK_CAPTURE(BM_Matmul, serial, Backend::Serial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Matmul, parallel, Backend::Parallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
