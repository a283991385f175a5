#include <benchmark/benchmark.h>

#include "heckespan/decomp.hpp"
#include "heckespan/qpoly.hpp"
#include "heckespan/homtheory.hpp"

using namespace heckespan;

namespace {

uint64_t rng_state = 0x2545f4914f6cdd1dull;
int64_t next_small() {
  rng_state ^= rng_state << 13;
  rng_state ^= rng_state >> 7;
  rng_state ^= rng_state << 17;
  return (int64_t)(rng_state % 19) - 9;
}

RatMat random_matrix(size_t n) {
  RatMat m(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) m.at(i, j) = (long)next_small();
  return m;
}

void BM_rref_30(benchmark::State& state) {
  RatMat m = random_matrix(30);
  for (auto _ : state) benchmark::DoNotOptimize(rref(m));
}
BENCHMARK(BM_rref_30);

void BM_charpoly_20(benchmark::State& state) {
  RatMat m = random_matrix(20);
  for (auto _ : state) benchmark::DoNotOptimize(charpoly(m));
}
BENCHMARK(BM_charpoly_20);

void BM_build_space(benchmark::State& state) {
  int64_t N = state.range(0);
  for (auto _ : state) {
    clear_space_registry();
    benchmark::DoNotOptimize(build_space(LevelGroup::gamma0(N)));
  }
}
BENCHMARK(BM_build_space)->Arg(37)->Arg(100);

void BM_hecke_T2(benchmark::State& state) {
  auto s = build_space(LevelGroup::gamma0(37));
  for (auto _ : state) {
    benchmark::DoNotOptimize(path_operator(*s, *s, hecke_coset_reps(*s, 2)));
  }
}
BENCHMARK(BM_hecke_T2);

void BM_hecke_span_11_22(benchmark::State& state) {
  decompose_gamma0(22);  // warm the per-level caches once
  for (auto _ : state) {
    benchmark::DoNotOptimize(hecke_span(CompactOpen::gamma0(11), CompactOpen::gamma0(22), 4));
  }
}
BENCHMARK(BM_hecke_span_11_22);

void BM_decompose_37(benchmark::State& state) {
  auto s = build_space(LevelGroup::gamma0(37));
  for (auto _ : state) benchmark::DoNotOptimize(decompose(*s));
}
BENCHMARK(BM_decompose_37);

}  // namespace

BENCHMARK_MAIN();
