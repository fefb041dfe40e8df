#include "sconlab/simulate.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "sconlab/errors.h"
#include "sconlab/ou.h"

namespace sconlab {
namespace {

TimeGrid Grid(double t_max, double dt, std::vector<double> snapshots) {
  TimeGrid grid;
  grid.t_max = t_max;
  grid.dt = dt;
  grid.snapshot_times = std::move(snapshots);
  return grid;
}

Matrix DiagA() {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  return a;
}

std::filesystem::path TempPath(const std::string& name) {
  return std::filesystem::path(::testing::TempDir()) / name;
}

TEST(TimeGridTest, Validation) {
  EXPECT_NO_THROW(Grid(1.0, 0.1, {0.0, 0.5, 1.0}).validate());
  EXPECT_THROW(Grid(1.0, 0.0, {0.5}).validate(), InvalidArgument);
  EXPECT_THROW(Grid(0.0, 0.1, {0.0}).validate(), InvalidArgument);
  EXPECT_THROW(Grid(1.0, 0.1, {}).validate(), InvalidArgument);
  EXPECT_THROW(Grid(1.0, 0.1, {0.5, 0.2}).validate(), InvalidArgument);
  EXPECT_THROW(Grid(1.0, 0.1, {1.5}).validate(), InvalidArgument);
  // Each snapshot must sit within dt/2 of a grid point; 0.11 and 0.12 share step 1.
  EXPECT_THROW(Grid(1.0, 0.1, {0.11, 0.12}).validate(), InvalidArgument);
  EXPECT_THROW(Grid(1e8, 1.0, {1.0}).validate(), InvalidArgument);
}

TEST(TimeGridTest, GeometricDefault) {
  const TimeGrid grid = TimeGrid::geometric(6.0, 1e-3);
  ASSERT_EQ(grid.snapshot_times.size(), 26u);
  EXPECT_EQ(grid.snapshot_times.front(), 0.0);
  EXPECT_NEAR(grid.snapshot_times[1], 0.06, 1e-12);
  EXPECT_NEAR(grid.snapshot_times.back(), 6.0, 1e-12);
  for (std::size_t i = 1; i < grid.snapshot_times.size(); ++i) {
    EXPECT_GT(grid.snapshot_times[i], grid.snapshot_times[i - 1]);
  }
  // Geometric spacing: constant ratio between consecutive positive times.
  const double ratio = std::pow(100.0, 1.0 / 24.0);
  for (std::size_t i = 2; i < grid.snapshot_times.size(); ++i) {
    EXPECT_NEAR(grid.snapshot_times[i] / grid.snapshot_times[i - 1], ratio, 0.02);
  }
}

TEST(TimeGridTest, GeometricMergesExtraTimes) {
  const TimeGrid grid = TimeGrid::geometric(3.0, 1e-3, 25, {0.5, 1.0, 3.0});
  for (double t : {0.5, 1.0, 3.0}) {
    EXPECT_NE(std::find_if(grid.snapshot_times.begin(), grid.snapshot_times.end(),
                           [t](double s) { return std::abs(s - t) < 1e-12; }),
              grid.snapshot_times.end());
  }
}

TEST(EulerMaruyamaTest, DeterministicDecayMatchesExponential) {
  const SdeSystem system = make_scalar_linear_system(-1.0, 0.0, 1);
  RngStream stream(derive_key(1, "em"), 0);
  const Matrix path = euler_maruyama(system, Vector::Ones(1), Grid(1.0, 1e-4, {0.0, 1.0}), stream);
  EXPECT_EQ(path(0, 0), 1.0);
  EXPECT_LT(std::abs(path(1, 0) - std::exp(-1.0)), 1e-3);
}

TEST(EulerMaruyamaTest, FirstOrderConvergenceInDt) {
  const SdeSystem system = make_scalar_linear_system(-1.0, 0.0, 1);
  double previous = 0.0;
  for (double dt : {1e-2, 5e-3, 2.5e-3}) {
    RngStream stream(derive_key(1, "em"), 0);
    const Matrix path = euler_maruyama(system, Vector::Ones(1), Grid(1.0, dt, {1.0}), stream);
    const double error = std::abs(path(0, 0) - std::exp(-1.0));
    if (previous > 0.0) {
      EXPECT_NEAR(previous / error, 2.0, 0.05);
    }
    previous = error;
  }
}

TEST(EulerMaruyamaTest, BrownianMotionMean) {
  const SdeSystem system = SdeSystem::with_additive_noise(
      2, [](const Vector&) -> Vector { return Vector::Zero(2); }, Matrix::Identity(2, 2));
  Vector x0(2);
  x0 << 1.0, -2.0;
  const double t = 1.0;
  const int n = 10000;
  const Ensemble ens = simulate_ensemble(system, InitialSampler::point(x0), n,
                                         Grid(t, 1e-2, {t}), 17, "bm");
  const Vector mean = ens.snapshots[0].colwise().mean().transpose();
  for (int k = 0; k < 2; ++k) EXPECT_LT(std::abs(mean(k) - x0(k)), 4.0 * std::sqrt(t / n));
}

TEST(EulerMaruyamaTest, BlowUpReportsStep) {
  const SdeSystem system = make_scalar_linear_system(50.0, 0.0, 1);
  RngStream stream(derive_key(1, "em"), 0);
  try {
    euler_maruyama(system, Vector::Ones(1), Grid(10.0, 0.1, {10.0}), stream);
    FAIL() << "expected BlowUpError";
  } catch (const BlowUpError& e) {
    // |x_k| = 6^k exceeds 1e8 first at k = 11.
    EXPECT_EQ(e.step(), 11);
    EXPECT_NE(std::string(e.what()).find("blow-up at step 11"), std::string::npos);
  }
}

TEST(EulerMaruyamaTest, BlowUpInEnsembleNamesTrajectory) {
  const SdeSystem system = make_scalar_linear_system(50.0, 0.0, 1);
  try {
    simulate_ensemble(system, InitialSampler::point(Vector::Ones(1)), 3,
                      Grid(10.0, 0.1, {10.0}), 1, "mu");
    FAIL() << "expected BlowUpError";
  } catch (const BlowUpError& e) {
    EXPECT_EQ(e.trajectory(), 0);
  }
}

TEST(InitialSamplerTest, KindsAndValidation) {
  EXPECT_THROW(InitialSampler::gaussian(Vector::Zero(2), SymmetricMatrix::identity(3)),
               InvalidArgument);
  EXPECT_THROW(InitialSampler::uniform_box(Vector::Ones(2), Vector::Zero(2)), InvalidArgument);
  Matrix bad = Matrix::Identity(2, 2);
  bad(1, 1) = -1.0;
  EXPECT_THROW(InitialSampler::gaussian(Vector::Zero(2), SymmetricMatrix(bad)),
               NotPositiveSemidefiniteError);

  RngStream stream(derive_key(2, "s"), 0);
  const InitialSampler box = InitialSampler::uniform_box(Vector::Zero(2), Vector::Ones(2));
  for (int i = 0; i < 100; ++i) {
    const Vector x = box.sample(stream);
    EXPECT_TRUE((x.array() >= 0.0).all() && (x.array() <= 1.0).all());
  }
  EXPECT_FALSE(box.as_gaussian().has_value());
  const auto point = InitialSampler::point(Vector::Ones(3)).as_gaussian();
  ASSERT_TRUE(point.has_value());
  EXPECT_EQ(point->cov.trace(), 0.0);
}

TEST(InitialSamplerTest, GaussianMoments) {
  Vector mean(2);
  mean << 1.0, -1.0;
  Matrix cov(2, 2);
  cov << 2.0, 0.6, 0.6, 0.5;
  const InitialSampler sampler = InitialSampler::gaussian(mean, SymmetricMatrix(cov));
  RngStream stream(derive_key(3, "g"), 0);
  const int n = 40000;
  Matrix samples(n, 2);
  for (int i = 0; i < n; ++i) samples.row(i) = sampler.sample(stream).transpose();
  const Vector m = samples.colwise().mean().transpose();
  const Matrix centered = samples.rowwise() - m.transpose();
  const Matrix c = centered.transpose() * centered / (n - 1);
  for (int k = 0; k < 2; ++k) EXPECT_LT(std::abs(m(k) - mean(k)), 4.0 * std::sqrt(cov(k, k) / n));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double se = std::sqrt((cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j)) / n);
      EXPECT_LT(std::abs(c(i, j) - cov(i, j)), 4.0 * se);
    }
  }
}

class EnsembleTest : public ::testing::Test {
 protected:
  const SdeSystem system_ = make_linear_mean_reverting_system(DiagA(), Vector::Zero(2), 0.5);
  const InitialSampler sampler_ =
      InitialSampler::gaussian(Vector::Zero(2), SymmetricMatrix(0.1 * Matrix::Identity(2, 2)));
  const TimeGrid grid_ = Grid(1.0, 1e-2, {0.0, 0.5, 1.0});
};

TEST_F(EnsembleTest, SameSeedBitIdentical) {
  const Ensemble a = simulate_ensemble(system_, sampler_, 64, grid_, 7, "mu");
  const Ensemble b = simulate_ensemble(system_, sampler_, 64, grid_, 7, "mu");
  for (std::size_t s = 0; s < a.snapshots.size(); ++s) EXPECT_EQ(a.snapshots[s], b.snapshots[s]);
}

TEST_F(EnsembleTest, IndependentOfThreadCount) {
  const Ensemble a = simulate_ensemble(system_, sampler_, 101, grid_, 7, "mu", {.threads = 1, .init_tag = {}});
  for (unsigned threads : {2u, 3u, 8u}) {
    const Ensemble b =
        simulate_ensemble(system_, sampler_, 101, grid_, 7, "mu", {.threads = threads, .init_tag = {}});
    for (std::size_t s = 0; s < a.snapshots.size(); ++s) {
      EXPECT_EQ(a.snapshots[s], b.snapshots[s]) << threads << " threads";
    }
  }
}

TEST_F(EnsembleTest, LawTagsGiveDistinctNoise) {
  const InitialSampler point = InitialSampler::point(Vector::Zero(2));
  const TimeGrid one_step = Grid(0.01, 0.01, {0.01});
  const Ensemble mu = simulate_ensemble(system_, point, 10, one_step, 7, "mu");
  const Ensemble nu = simulate_ensemble(system_, point, 10, one_step, 7, "nu");
  for (int i = 0; i < 10; ++i) EXPECT_NE(mu.snapshots[0].row(i), nu.snapshots[0].row(i));
}

TEST_F(EnsembleTest, SharedInitTagCouplesInitialStates) {
  SimulationOptions coupled;
  coupled.init_tag = "pair";
  const Ensemble mu = simulate_ensemble(system_, sampler_, 20, grid_, 7, "mu", coupled);
  const Ensemble nu = simulate_ensemble(system_, sampler_, 20, grid_, 7, "nu", coupled);
  EXPECT_EQ(mu.snapshots[0], nu.snapshots[0]);
  EXPECT_NE(mu.snapshots[1], nu.snapshots[1]);
  EXPECT_EQ(mean_square_gap(mu, nu)[0], 0.0);
}

TEST_F(EnsembleTest, SampleMeanMatchesOuOracle) {
  Vector m0(2);
  m0 << 1.0, -0.5;
  const InitialSampler sampler =
      InitialSampler::gaussian(m0, SymmetricMatrix(0.1 * Matrix::Identity(2, 2)));
  const int n = 4000;
  const TimeGrid grid = Grid(1.0, 1e-3, {0.5, 1.0});
  const Ensemble ens = simulate_ensemble(system_, sampler, n, grid, 11, "mu");
  const OuSystem ou(DiagA(), Vector::Zero(2), 0.5);
  for (std::size_t s = 0; s < grid.snapshot_times.size(); ++s) {
    const GaussianLaw law =
        ou_law(ou, grid.snapshot_times[s], {m0, SymmetricMatrix(0.1 * Matrix::Identity(2, 2))});
    const Vector mean = ens.snapshots[s].colwise().mean().transpose();
    for (int k = 0; k < 2; ++k) {
      EXPECT_LT(std::abs(mean(k) - law.mean(k)), 4.0 * std::sqrt(law.cov(k, k) / n));
    }
  }
}

TEST(MeanSquareGapTest, IdenticalEnsemblesGiveZero) {
  const SdeSystem system = make_scalar_linear_system(-1.0, 1.0, 2);
  const Ensemble ens = simulate_ensemble(system, InitialSampler::point(Vector::Ones(2)), 30,
                                         Grid(1.0, 0.01, {0.0, 1.0}), 3, "mu");
  for (double g : mean_square_gap(ens, ens)) EXPECT_EQ(g, 0.0);
}

TEST(MeanSquareGapTest, PointMassesAtTimeZero) {
  const SdeSystem system = make_scalar_linear_system(-1.0, 1.0, 2);
  Vector x0(2), y0(2);
  x0 << 1.0, 2.0;
  y0 << -1.0, 0.5;
  const TimeGrid grid = Grid(1.0, 0.01, {0.0, 1.0});
  const Ensemble x = simulate_ensemble(system, InitialSampler::point(x0), 30, grid, 3, "mu");
  const Ensemble y = simulate_ensemble(system, InitialSampler::point(y0), 30, grid, 3, "nu");
  EXPECT_DOUBLE_EQ(mean_square_gap(x, y)[0], (x0 - y0).squaredNorm());
}

TEST(MeanSquareGapTest, MatchesDirectComputationAtTimeZero) {
  const SdeSystem system = make_scalar_linear_system(-1.0, 1.0, 3);
  const InitialSampler sampler =
      InitialSampler::uniform_box(Vector::Constant(3, -1.0), Vector::Constant(3, 1.0));
  const TimeGrid grid = Grid(0.5, 0.01, {0.0, 0.5});
  const Ensemble x = simulate_ensemble(system, sampler, 50, grid, 3, "mu");
  const Ensemble y = simulate_ensemble(system, sampler, 50, grid, 3, "nu");
  double direct = 0.0;
  for (int i = 0; i < 50; ++i) direct += (x.snapshots[0].row(i) - y.snapshots[0].row(i)).squaredNorm();
  EXPECT_DOUBLE_EQ(mean_square_gap(x, y)[0], direct / 50);
}

TEST(MeanSquareGapTest, StationaryIndependentSolutions) {
  // Two independent stationary OU solutions: E||X - Y||^2 = 2 tr(Sigma_inf).
  const OuSystem ou(DiagA(), Vector::Zero(2), 0.5);
  const InitialSampler stationary =
      InitialSampler::gaussian(Vector::Zero(2), ou.stationary_cov());
  const SdeSystem system = ou.to_sde();
  const int n = 8000;
  const TimeGrid grid = Grid(3.0, 1e-2, {3.0});
  const Ensemble x = simulate_ensemble(system, stationary, n, grid, 5, "mu");
  const Ensemble y = simulate_ensemble(system, stationary, n, grid, 5, "nu");
  const double expected = 2.0 * ou.stationary_cov().trace();
  // Var ||X - Y||^2 for Z ~ N(0, 2 Sigma) is 2 tr((2 Sigma)^2).
  const Matrix two_sigma = 2.0 * ou.stationary_cov().matrix();
  const double se = std::sqrt(2.0 * (two_sigma * two_sigma).trace() / n);
  EXPECT_LT(std::abs(mean_square_gap(x, y)[0] - expected), 4.0 * se);
}

TEST(MeanSquareGapTest, ShapeMismatchRejected) {
  const SdeSystem system = make_scalar_linear_system(-1.0, 1.0, 1);
  const TimeGrid grid = Grid(1.0, 0.1, {1.0});
  const Ensemble x = simulate_ensemble(system, InitialSampler::point(Vector::Zero(1)), 5, grid, 1, "mu");
  const Ensemble y = simulate_ensemble(system, InitialSampler::point(Vector::Zero(1)), 6, grid, 1, "nu");
  EXPECT_THROW(mean_square_gap(x, y), InvalidArgument);
}

TEST(EnsembleIoTest, CsvLayout) {
  const SdeSystem system = make_scalar_linear_system(-1.0, 1.0, 2);
  const Ensemble ens = simulate_ensemble(system, InitialSampler::point(Vector::Ones(2)), 3,
                                         Grid(1.0, 0.5, {0.0, 1.0}), 1, "mu");
  std::ostringstream out;
  write_ensemble_csv(ens, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,traj,x1,x2");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 6);
  EXPECT_NE(out.str().find("\n0,2,1,1\n"), std::string::npos);
}

TEST(EnsembleIoTest, BinaryRoundTripIsBitExact) {
  const SdeSystem system = make_scalar_linear_system(-1.0, 1.0, 3);
  const Ensemble ens = simulate_ensemble(
      system, InitialSampler::uniform_box(Vector::Zero(3), Vector::Ones(3)), 17,
      Grid(1.0, 0.01, {0.0, 0.3, 1.0}), 99, "nu");
  const auto path = TempPath("ensemble_roundtrip.bin");
  write_ensemble_binary(ens, path);
  EXPECT_EQ(std::filesystem::file_size(path), 3u * 17u * 3u * sizeof(double));
  const Ensemble back = read_ensemble_binary(path);
  EXPECT_EQ(back.n_traj, 17);
  EXPECT_EQ(back.dim, 3);
  EXPECT_EQ(back.master_seed, 99u);
  EXPECT_EQ(back.law_tag, "nu");
  EXPECT_EQ(back.snapshot_times, ens.snapshot_times);
  for (std::size_t s = 0; s < ens.snapshots.size(); ++s) EXPECT_EQ(back.snapshots[s], ens.snapshots[s]);

  std::ifstream sidecar(path.string() + ".json");
  const auto meta = nlohmann::json::parse(sidecar);
  EXPECT_EQ(meta.at("shape"), nlohmann::json({3, 17, 3}));
}

TEST(EnsembleIoTest, PointCloudCsvReaders) {
  const SdeSystem system = make_scalar_linear_system(-1.0, 1.0, 2);
  const Ensemble ens = simulate_ensemble(
      system, InitialSampler::uniform_box(Vector::Zero(2), Vector::Ones(2)), 5,
      Grid(1.0, 0.01, {0.0, 0.5, 1.0}), 4, "mu");
  const auto path = TempPath("ensemble_cloud.csv");
  write_ensemble_csv(ens, path);
  EXPECT_EQ(read_point_cloud_csv(path).points(), ens.snapshots[2]);
  EXPECT_EQ(read_point_cloud_csv(path, 0.49).points(), ens.snapshots[1]);

  const auto plain = TempPath("plain_cloud.csv");
  {
    std::ofstream out(plain);
    out << "x,y\n1,2\n3,4.5\n";
  }
  const PointCloud cloud = read_point_cloud_csv(plain);
  ASSERT_EQ(cloud.size(), 2);
  EXPECT_EQ(cloud.points()(1, 1), 4.5);
  EXPECT_THROW(read_point_cloud_csv(TempPath("does_not_exist.csv")), IoError);
}

}  // namespace
}  // namespace sconlab
