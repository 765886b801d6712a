#include <benchmark/benchmark.h>

#include "trda/robust.hpp"
#include "trda/rng.hpp"

namespace {

// Standard normal rows with a 10% shifted cluster, the typical MCD workload.
trda::Matrix make_data(int n, int p, std::uint64_t seed) {
  trda::RngStream rng({0xda7a, seed});
  trda::Matrix x(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
  for (int i = 0; i < n / 10; ++i) x(i, 0) += 8.0;
  return x;
}

void bm_fast_mcd(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int p = static_cast<int>(state.range(1));
  const trda::Matrix x = make_data(n, p, 1);
  const trda::RobustConfig cfg;
  const trda::StreamKey key{{0xbe9c, 2}};
  for (auto _ : state) {
    trda::RobustEstimate est = trda::fast_mcd(x, cfg, key);
    benchmark::DoNotOptimize(est.log_det);
  }
}

void bm_mrcd_wide(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int p = static_cast<int>(state.range(1));
  const trda::Matrix x = make_data(n, p, 3);
  const trda::RobustConfig cfg;
  const trda::StreamKey key{{0xbe9c, 4}};
  for (auto _ : state) {
    trda::RobustEstimate est = trda::mrcd(x, cfg, key);
    benchmark::DoNotOptimize(est.log_det);
  }
}

}  // namespace

BENCHMARK(bm_fast_mcd)->Args({100, 3})->Args({400, 3})->Args({200, 5});
BENCHMARK(bm_mrcd_wide)->Args({30, 40});
