#include <benchmark/benchmark.h>

#include "sconlab/model.h"
#include "sconlab/simulate.h"

namespace sconlab {
namespace {

// Reference OU system: A = diag(1, 2), sigma = 0.5, t in [0, 1] at dt = 1e-3.
void BM_SimulateOuEnsemble(benchmark::State& state) {
  const int n_traj = static_cast<int>(state.range(0));
  const unsigned threads = static_cast<unsigned>(state.range(1));
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  const SdeSystem system = make_linear_mean_reverting_system(a, Vector::Zero(2), 0.5);
  const InitialSampler sampler = InitialSampler::point(Vector::Ones(2));
  const TimeGrid grid = TimeGrid::geometric(1.0, 1e-3);
  SimulationOptions options;
  options.threads = threads;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        simulate_ensemble(system, sampler, n_traj, grid, 1, "mu", options).snapshots);
  }
  state.SetItemsProcessed(state.iterations() * n_traj * 1000);
}
BENCHMARK(BM_SimulateOuEnsemble)
    ->ArgsProduct({{200, 2000}, {1, 4}})
    ->ArgNames({"n_traj", "threads"})
    ->UseRealTime()
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace sconlab
