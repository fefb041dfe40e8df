#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sconlab/model.h"
#include "sconlab/numerics.h"
#include "sconlab/rng.h"
#include "sconlab/wasserstein.h"

namespace sconlab {

/// Uniform step dt on [0, t_max] with states recorded at snapshot_times.
/// Snapshot s is taken at grid step round(t_s / dt).
struct TimeGrid {
  double t_max = 1.0;
  double dt = 1e-3;
  std::vector<double> snapshot_times;

  void validate() const;
  std::vector<long> snapshot_steps() const;

  /// t = 0 plus `count` geometrically spaced times from t_max / 100 to t_max,
  /// snapped onto the grid, merged with `extra` times, deduplicated.
  static TimeGrid geometric(double t_max, double dt, int count = 25,
                            const std::vector<double>& extra = {});

  static constexpr double kMaxSteps = 1e7;
};

/// Initial-condition law. Gaussian sampling uses the symmetric square root
/// of the covariance, so singular covariances are allowed.
class InitialSampler {
 public:
  struct Gaussian {
    Vector mean;
    SymmetricMatrix cov;
  };
  struct Point {
    Vector x0;
  };
  struct UniformBox {
    Vector lower;
    Vector upper;
  };
  using Kind = std::variant<Gaussian, Point, UniformBox>;

  static InitialSampler gaussian(const Vector& mean, const SymmetricMatrix& cov);
  static InitialSampler point(const Vector& x0);
  static InitialSampler uniform_box(const Vector& lower, const Vector& upper);

  int dim() const;
  const Kind& kind() const { return kind_; }
  Vector sample(RngStream& stream) const;

  /// The law as a Gaussian (a point mass has zero covariance); empty for the
  /// uniform box.
  std::optional<GaussianLaw> as_gaussian() const;

 private:
  explicit InitialSampler(Kind kind);

  Kind kind_;
  Matrix cov_sqrt_;
};

/// States of n_traj trajectories at each snapshot time.
struct Ensemble {
  int n_traj = 0;
  int dim = 0;
  std::vector<double> snapshot_times;
  std::vector<Matrix> snapshots;  // one n_traj x dim matrix per snapshot
  std::uint64_t master_seed = 0;
  std::string law_tag;

  PointCloud cloud(std::size_t snapshot) const {
    return PointCloud(snapshots.at(snapshot));
  }
};

inline constexpr double kBlowUpNorm = 1e8;

/// Explicit Euler–Maruyama:
///   X_{k+1} = X_k + f(X_k) dt + sigma(X_k, t_k) sqrt(dt) xi_k,
/// xi_k ~ N(0, I) drawn from `stream`. Returns one row per snapshot.
/// Throws BlowUpError if the state becomes non-finite or exceeds 1e8 in norm.
Matrix euler_maruyama(const SdeSystem& system, const Vector& x0,
                      const TimeGrid& grid, RngStream& stream);

struct SimulationOptions {
  unsigned threads = 1;  // 0 = all cores
  /// Tag for the initial-state stream; defaults to law_tag. Two ensembles
  /// sharing an init_tag and seed start from identical initial states.
  std::optional<std::string> init_tag;
};

/// Trajectory i uses the noise stream (derive_key(seed, law_tag), i). Initial
/// states come from one sequential stream keyed by (seed, init_tag + "/init").
/// The result does not depend on options.threads.
Ensemble simulate_ensemble(const SdeSystem& system,
                           const InitialSampler& sampler, int n_traj,
                           const TimeGrid& grid, std::uint64_t master_seed,
                           const std::string& law_tag,
                           const SimulationOptions& options = {});

/// Per snapshot, (1/n) sum_i ||X_i - Y_i||^2 under the index pairing.
std::vector<double> mean_square_gap(const Ensemble& x, const Ensemble& y);

/// Header `t,traj,x1,...,xd`, one row per (snapshot, trajectory).
void write_ensemble_csv(const Ensemble& ensemble, std::ostream& out);
void write_ensemble_csv(const Ensemble& ensemble,
                        const std::filesystem::path& path);

/// Little-endian float64 values in row-major [snapshot][traj][dim] order at
/// `path`, plus a JSON sidecar at `path` + ".json" with shape and seed.
void write_ensemble_binary(const Ensemble& ensemble,
                           const std::filesystem::path& path);
Ensemble read_ensemble_binary(const std::filesystem::path& path);

/// Reads a point cloud from CSV. An ensemble CSV (header starting `t,traj`)
/// yields the states at the snapshot closest to `time` (the last snapshot when
/// unset); any other CSV is read as one point per row, with an optional
/// non-numeric header line.
PointCloud read_point_cloud_csv(const std::filesystem::path& path,
                                std::optional<double> time = std::nullopt);

}  // namespace sconlab
