#include <benchmark/benchmark.h>

#include "sconlab/numerics.h"
#include "sconlab/rng.h"

namespace sconlab {
namespace {

Matrix random_matrix(int d, std::uint64_t seed) {
  RngStream stream(derive_key(seed, "bench/matrix"), 0);
  Matrix m(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) m(i, j) = stream.normal();
  }
  return m;
}

void BM_Expm(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Matrix a = random_matrix(d, 1);
  for (auto _ : state) benchmark::DoNotOptimize(expm(a));
}
BENCHMARK(BM_Expm)->Arg(2)->Arg(5)->Arg(20)->Arg(100);

void BM_PsdSqrt(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Matrix b = random_matrix(d, 2);
  const SymmetricMatrix s(b * b.transpose());
  for (auto _ : state) benchmark::DoNotOptimize(psd_sqrt(s));
}
BENCHMARK(BM_PsdSqrt)->Arg(2)->Arg(5)->Arg(20)->Arg(100);

void BM_NormalDraws(benchmark::State& state) {
  RngStream stream(derive_key(3, "bench/normal"), 0);
  for (auto _ : state) benchmark::DoNotOptimize(stream.normal());
}
BENCHMARK(BM_NormalDraws);

}  // namespace
}  // namespace sconlab
