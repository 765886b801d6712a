#include <benchmark/benchmark.h>

#include "trda/linalg.hpp"
#include "trda/moments.hpp"
#include "trda/reduce.hpp"
#include "trda/rng.hpp"

namespace {

// Synthetic pencil shaped like a discriminant problem: low-rank between
// part, well-conditioned within part.
trda::ScatterPair make_pencil(int p, int rank, std::uint64_t seed) {
  trda::RngStream rng({0xbe9c, seed, static_cast<std::uint64_t>(p)});
  trda::Matrix a(p, rank);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < rank; ++j) a(i, j) = rng.normal();
  trda::Matrix g(p, p + 5);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p + 5; ++j) g(i, j) = rng.normal();

  trda::ScatterPair s;
  s.b = a * a.transpose();
  s.w = g * g.transpose() / static_cast<double>(p + 5);
  s.s_pooled = s.w;
  s.source = trda::ScatterSource::theoretical;
  return s;
}

void bm_fda(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const trda::ScatterPair s = make_pencil(p, 3, 1);
  for (auto _ : state) {
    trda::Projection proj = trda::fda(s, 2);
    benchmark::DoNotOptimize(proj.v.data());
  }
}

void bm_solve_tr(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const trda::ScatterPair s = make_pencil(p, 3, 1);
  for (auto _ : state) {
    trda::Projection proj = trda::solve_tr(s, 2);
    benchmark::DoNotOptimize(proj.rho);
  }
}

void bm_rho_profile(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const trda::ScatterPair s = make_pencil(p, 8, 1);
  for (auto _ : state) {
    auto profile = trda::rho_profile(s, 8);
    benchmark::DoNotOptimize(profile.data());
  }
}

}  // namespace

BENCHMARK(bm_fda)->Arg(5)->Arg(20)->Arg(50)->Arg(100);
BENCHMARK(bm_solve_tr)->Arg(5)->Arg(20)->Arg(50)->Arg(100);
BENCHMARK(bm_rho_profile)->Arg(20)->Arg(50);

BENCHMARK_MAIN();
