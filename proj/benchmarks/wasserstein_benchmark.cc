#include <benchmark/benchmark.h>

#include "sconlab/rng.h"
#include "sconlab/wasserstein.h"

namespace sconlab {
namespace {

PointCloud gaussian_cloud(int n, int d, std::uint64_t seed) {
  RngStream stream(derive_key(seed, "bench/cloud"), 0);
  Matrix m(n, d);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) m(i, k) = stream.normal();
  }
  return PointCloud(m);
}

void BM_W2Assignment(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PointCloud x = gaussian_cloud(n, 2, 1);
  const PointCloud y = gaussian_cloud(n, 2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(w2_assignment(x, y).distance);
  state.SetComplexityN(n);
}
BENCHMARK(BM_W2Assignment)
    ->RangeMultiplier(4)
    ->Range(32, 2048)
    ->Unit(benchmark::kMillisecond)
    ->Complexity();

void BM_W2Sinkhorn(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const double epsilon = static_cast<double>(state.range(1)) / 1000.0;
  const PointCloud x = gaussian_cloud(n, 2, 3);
  const PointCloud y = gaussian_cloud(n, 2, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(w2_sinkhorn(x, y, {epsilon, 1e-9, 100000}).distance_upper);
  }
}
BENCHMARK(BM_W2Sinkhorn)
    ->ArgsProduct({{50, 200}, {1000, 100, 10}})
    ->ArgNames({"n", "eps_x1000"})
    ->Unit(benchmark::kMillisecond);

void BM_W2Gaussian(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Matrix a = gaussian_cloud(d, d, 5).points();
  const Matrix b = gaussian_cloud(d, d, 6).points();
  const GaussianLaw p{Vector::Zero(d), SymmetricMatrix(a * a.transpose())};
  const GaussianLaw q{Vector::Ones(d), SymmetricMatrix(b * b.transpose())};
  for (auto _ : state) benchmark::DoNotOptimize(w2_gaussian(p, q));
}
BENCHMARK(BM_W2Gaussian)->Arg(2)->Arg(5)->Arg(50);

}  // namespace
}  // namespace sconlab
