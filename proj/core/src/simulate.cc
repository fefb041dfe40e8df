#include "sconlab/simulate.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "sconlab/errors.h"
#include "sconlab/parallel.h"
#include "text_util.h"

namespace sconlab {

void TimeGrid::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidArgument("TimeGrid: dt must be positive and finite");
  }
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw InvalidArgument("TimeGrid: t_max must be positive and finite");
  }
  if (t_max / dt > kMaxSteps) {
    throw InvalidArgument("TimeGrid: t_max/dt exceeds the 1e7 step limit");
  }
  if (snapshot_times.empty()) {
    throw InvalidArgument("TimeGrid: at least one snapshot time is required");
  }
  for (std::size_t s = 0; s < snapshot_times.size(); ++s) {
    const double t = snapshot_times[s];
    if (!(t >= 0.0) || t > t_max + 0.5 * dt) {
      throw InvalidArgument("TimeGrid: snapshot time " + std::to_string(t) +
                            " outside [0, t_max]");
    }
    if (s > 0 && !(t > snapshot_times[s - 1])) {
      throw InvalidArgument("TimeGrid: snapshot times must be increasing");
    }
  }
  const auto steps = snapshot_steps();
  for (std::size_t s = 1; s < steps.size(); ++s) {
    if (steps[s] == steps[s - 1]) {
      throw InvalidArgument("TimeGrid: two snapshots map to the same step");
    }
  }
}

std::vector<long> TimeGrid::snapshot_steps() const {
  std::vector<long> steps;
  steps.reserve(snapshot_times.size());
  for (double t : snapshot_times) steps.push_back(std::lround(t / dt));
  return steps;
}

TimeGrid TimeGrid::geometric(double t_max, double dt, int count,
                             const std::vector<double>& extra) {
  std::set<long> steps = {0};
  const double t_first = t_max / 100.0;
  for (int k = 0; k < count; ++k) {
    const double frac = count == 1 ? 1.0 : static_cast<double>(k) / (count - 1);
    const double t = t_first * std::pow(t_max / t_first, frac);
    steps.insert(std::lround(t / dt));
  }
  for (double t : extra) steps.insert(std::lround(t / dt));
  TimeGrid grid;
  grid.t_max = t_max;
  grid.dt = dt;
  for (long s : steps) grid.snapshot_times.push_back(static_cast<double>(s) * dt);
  grid.validate();
  return grid;
}

InitialSampler::InitialSampler(Kind kind) : kind_(std::move(kind)) {}

InitialSampler InitialSampler::gaussian(const Vector& mean,
                                        const SymmetricMatrix& cov) {
  require_finite(mean, "gaussian initial mean");
  if (cov.dim() != mean.size()) {
    throw InvalidArgument("gaussian initial law: covariance dimension mismatch");
  }
  InitialSampler sampler(Gaussian{mean, cov});
  sampler.cov_sqrt_ = psd_sqrt(cov).matrix();
  return sampler;
}

InitialSampler InitialSampler::point(const Vector& x0) {
  if (x0.size() == 0) throw InvalidArgument("point initial law: empty x0");
  require_finite(x0, "point initial law");
  return InitialSampler(Point{x0});
}

InitialSampler InitialSampler::uniform_box(const Vector& lower,
                                           const Vector& upper) {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw InvalidArgument("uniform_box initial law: bad corner dimensions");
  }
  require_finite(lower, "uniform_box lower");
  require_finite(upper, "uniform_box upper");
  if (!(lower.array() < upper.array()).all()) {
    throw InvalidArgument("uniform_box initial law: need lower < upper");
  }
  return InitialSampler(UniformBox{lower, upper});
}

int InitialSampler::dim() const {
  return std::visit(
      [](const auto& k) -> int {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return static_cast<int>(k.mean.size());
        } else if constexpr (std::is_same_v<T, Point>) {
          return static_cast<int>(k.x0.size());
        } else {
          return static_cast<int>(k.lower.size());
        }
      },
      kind_);
}

Vector InitialSampler::sample(RngStream& stream) const {
  if (const auto* g = std::get_if<Gaussian>(&kind_)) {
    Vector z(g->mean.size());
    stream.fill_normal(z);
    return g->mean + cov_sqrt_ * z;
  }
  if (const auto* p = std::get_if<Point>(&kind_)) return p->x0;
  const auto& box = std::get<UniformBox>(kind_);
  Vector x(box.lower.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    x(k) = box.lower(k) + stream.uniform() * (box.upper(k) - box.lower(k));
  }
  return x;
}

std::optional<GaussianLaw> InitialSampler::as_gaussian() const {
  if (const auto* g = std::get_if<Gaussian>(&kind_)) {
    return GaussianLaw{g->mean, g->cov};
  }
  if (const auto* p = std::get_if<Point>(&kind_)) {
    return GaussianLaw{p->x0, SymmetricMatrix::zero(static_cast<int>(p->x0.size()))};
  }
  return std::nullopt;
}

Matrix euler_maruyama(const SdeSystem& system, const Vector& x0,
                      const TimeGrid& grid, RngStream& stream) {
  grid.validate();
  const int d = system.dim();
  if (x0.size() != d) {
    throw InvalidArgument("euler_maruyama: x0 has wrong dimension");
  }
  require_finite(x0, "euler_maruyama x0");
  const auto steps = grid.snapshot_steps();
  const double dt = grid.dt;
  const double sqrt_dt = std::sqrt(dt);
  const auto& additive = system.additive_noise();

  Matrix out(static_cast<Eigen::Index>(steps.size()), d);
  Vector x = x0;
  Vector xi(d);
  std::size_t next = 0;
  for (long k = 0;; ++k) {
    while (next < steps.size() && steps[next] == k) out.row(next++) = x.transpose();
    if (next == steps.size()) break;
    stream.fill_normal(xi);
    const double t = static_cast<double>(k) * dt;
    if (additive) {
      x += system.drift(x) * dt + (*additive) * (sqrt_dt * xi);
    } else {
      x += system.drift(x) * dt + system.diffusion(x, t) * (sqrt_dt * xi);
    }
    const double norm = x.norm();
    if (!std::isfinite(norm) || norm > kBlowUpNorm) {
      throw BlowUpError("euler_maruyama: blow-up at step " +
                            std::to_string(k + 1) + " (|x| = " +
                            std::to_string(norm) + ")",
                        k + 1);
    }
  }
  return out;
}

Ensemble simulate_ensemble(const SdeSystem& system,
                           const InitialSampler& sampler, int n_traj,
                           const TimeGrid& grid, std::uint64_t master_seed,
                           const std::string& law_tag,
                           const SimulationOptions& options) {
  if (n_traj < 1) throw InvalidArgument("simulate_ensemble: n_traj must be >= 1");
  if (sampler.dim() != system.dim()) {
    throw InvalidArgument("simulate_ensemble: initial law dimension mismatch");
  }
  grid.validate();
  const int d = system.dim();

  const std::string init_tag = options.init_tag.value_or(law_tag);
  RngStream init_stream(derive_key(master_seed, init_tag + "/init"), 0);
  std::vector<Vector> initial;
  initial.reserve(static_cast<std::size_t>(n_traj));
  for (int i = 0; i < n_traj; ++i) initial.push_back(sampler.sample(init_stream));

  Ensemble ens;
  ens.n_traj = n_traj;
  ens.dim = d;
  ens.snapshot_times = grid.snapshot_times;
  ens.master_seed = master_seed;
  ens.law_tag = law_tag;
  ens.snapshots.assign(grid.snapshot_times.size(), Matrix(n_traj, d));

  const std::uint64_t noise_key = derive_key(master_seed, law_tag);
  parallel_for(static_cast<std::size_t>(n_traj), options.threads,
               [&](std::size_t i) {
                 RngStream stream(noise_key, i);
                 Matrix path;
                 try {
                   path = euler_maruyama(system, initial[i], grid, stream);
                 } catch (const BlowUpError& e) {
                   throw BlowUpError(std::string(e.what()) + " in trajectory " +
                                         std::to_string(i),
                                     e.step(), static_cast<long>(i));
                 }
                 for (Eigen::Index s = 0; s < path.rows(); ++s) {
                   ens.snapshots[static_cast<std::size_t>(s)].row(
                       static_cast<Eigen::Index>(i)) = path.row(s);
                 }
               });
  return ens;
}

std::vector<double> mean_square_gap(const Ensemble& x, const Ensemble& y) {
  if (x.n_traj != y.n_traj || x.dim != y.dim ||
      x.snapshot_times != y.snapshot_times ||
      x.snapshots.size() != y.snapshots.size()) {
    throw InvalidArgument("mean_square_gap: ensembles have different shapes");
  }
  std::vector<double> gap;
  gap.reserve(x.snapshots.size());
  for (std::size_t s = 0; s < x.snapshots.size(); ++s) {
    gap.push_back((x.snapshots[s] - y.snapshots[s]).rowwise().squaredNorm().sum() /
                  x.n_traj);
  }
  return gap;
}

void write_ensemble_csv(const Ensemble& ensemble, std::ostream& out) {
  out << "t,traj";
  for (int k = 1; k <= ensemble.dim; ++k) out << ",x" << k;
  out << '\n';
  for (std::size_t s = 0; s < ensemble.snapshots.size(); ++s) {
    const std::string t = internal::format_double(ensemble.snapshot_times[s]);
    const Matrix& states = ensemble.snapshots[s];
    for (int i = 0; i < ensemble.n_traj; ++i) {
      out << t << ',' << i;
      for (int k = 0; k < ensemble.dim; ++k) {
        out << ',' << internal::format_double(states(i, k));
      }
      out << '\n';
    }
  }
}

void write_ensemble_csv(const Ensemble& ensemble,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_ensemble_csv(ensemble, out);
  if (!out) throw IoError("write failed: " + path.string());
}

namespace {

std::uint64_t to_little_endian(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t swapped = 0;
    for (int b = 0; b < 8; ++b) {
      swapped = (swapped << 8) | ((bits >> (8 * b)) & 0xFF);
    }
    return swapped;
  }
  return bits;
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

}  // namespace

void write_ensemble_binary(const Ensemble& ensemble,
                           const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const Matrix& states : ensemble.snapshots) {
    for (int i = 0; i < ensemble.n_traj; ++i) {
      for (int k = 0; k < ensemble.dim; ++k) {
        const std::uint64_t bits =
            to_little_endian(std::bit_cast<std::uint64_t>(states(i, k)));
        out.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
      }
    }
  }
  if (!out) throw IoError("write failed: " + path.string());

  const nlohmann::json sidecar = {
      {"format", "float64-le-row-major"},
      {"shape", {ensemble.snapshots.size(), ensemble.n_traj, ensemble.dim}},
      {"axes", {"snapshot", "traj", "dim"}},
      {"snapshot_times", ensemble.snapshot_times},
      {"master_seed", ensemble.master_seed},
      {"law_tag", ensemble.law_tag},
      {"data_file", path.filename().string()}};
  std::ofstream meta(sidecar_path(path));
  if (!meta) throw IoError("cannot open " + sidecar_path(path).string());
  meta << sidecar.dump(2) << '\n';
  if (!meta) throw IoError("write failed: " + sidecar_path(path).string());
}

Ensemble read_ensemble_binary(const std::filesystem::path& path) {
  std::ifstream meta(sidecar_path(path));
  if (!meta) throw IoError("cannot open " + sidecar_path(path).string());
  nlohmann::json sidecar;
  try {
    meta >> sidecar;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed sidecar " + sidecar_path(path).string() + ": " +
                  e.what());
  }
  const auto shape = sidecar.at("shape").get<std::vector<std::size_t>>();
  if (shape.size() != 3) throw IoError("sidecar shape must have 3 entries");
  Ensemble ens;
  ens.n_traj = static_cast<int>(shape[1]);
  ens.dim = static_cast<int>(shape[2]);
  ens.snapshot_times = sidecar.at("snapshot_times").get<std::vector<double>>();
  ens.master_seed = sidecar.at("master_seed").get<std::uint64_t>();
  ens.law_tag = sidecar.at("law_tag").get<std::string>();

  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  ens.snapshots.assign(shape[0], Matrix(ens.n_traj, ens.dim));
  for (Matrix& states : ens.snapshots) {
    for (int i = 0; i < ens.n_traj; ++i) {
      for (int k = 0; k < ens.dim; ++k) {
        std::uint64_t bits = 0;
        in.read(reinterpret_cast<char*>(&bits), sizeof(bits));
        states(i, k) = std::bit_cast<double>(to_little_endian(bits));
      }
    }
  }
  if (!in) throw IoError("truncated ensemble file " + path.string());
  return ens;
}

PointCloud read_point_cloud_csv(const std::filesystem::path& path,
                                std::optional<double> time) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::vector<std::vector<double>> rows;
  bool ensemble_format = false;
  bool first = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = internal::split_csv_line(line);
    if (first) {
      first = false;
      if (fields.size() >= 2 && fields[0] == "t" && fields[1] == "traj") {
        ensemble_format = true;
        continue;
      }
      if (!internal::parse_double(fields.front())) continue;  // header
    }
    std::vector<double> row;
    for (const auto& f : fields) {
      const auto value = internal::parse_double(f);
      if (!value) {
        throw IoError(path.string() + ":" + std::to_string(line_no) +
                      ": non-numeric field '" + f + "'");
      }
      row.push_back(*value);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path.string() + ": no points");

  if (ensemble_format) {
    // Choose the snapshot time closest to `time` (or the last one).
    double chosen = rows.back()[0];
    if (time) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& r : rows) {
        if (std::abs(r[0] - *time) < best) {
          best = std::abs(r[0] - *time);
          chosen = r[0];
        }
      }
    }
    std::vector<std::vector<double>> selected;
    for (auto& r : rows) {
      if (r[0] == chosen) selected.emplace_back(r.begin() + 2, r.end());
    }
    rows = std::move(selected);
  }

  const std::size_t dim = rows.front().size();
  Matrix points(static_cast<Eigen::Index>(rows.size()),
                static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim) {
      throw IoError(path.string() + ": rows have inconsistent widths");
    }
    for (std::size_t k = 0; k < dim; ++k) {
      points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
  }
  return PointCloud(std::move(points));
}

}  // namespace sconlab
