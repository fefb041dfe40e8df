#include "sconlab/model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "sconlab/errors.h"
#include "sconlab/rng.h"

namespace sconlab {

SdeSystem::SdeSystem(int dim, DriftFn drift, DiffusionFn diffusion,
                     JacobianFn jacobian)
    : dim_(dim),
      drift_(std::move(drift)),
      diffusion_(std::move(diffusion)),
      jacobian_(std::move(jacobian)) {
  if (dim_ < 1) throw InvalidArgument("SdeSystem: dim must be positive");
  if (!drift_ || !diffusion_) {
    throw InvalidArgument("SdeSystem: drift and diffusion are required");
  }
}

SdeSystem SdeSystem::with_additive_noise(int dim, DriftFn drift,
                                         const Matrix& sigma,
                                         JacobianFn jacobian) {
  if (sigma.rows() != dim || sigma.cols() != dim) {
    throw InvalidArgument("SdeSystem: additive noise must be d x d");
  }
  require_finite(sigma, "SdeSystem additive noise");
  SdeSystem system(
      dim, std::move(drift), [sigma](const Vector&, double) { return sigma; },
      std::move(jacobian));
  system.additive_noise_ = sigma;
  return system;
}

Vector SdeSystem::drift(const Vector& x) const {
  Vector f = drift_(x);
  if (f.size() != dim_) {
    throw InvalidArgument("SdeSystem: drift returned size " +
                          std::to_string(f.size()) + ", expected " +
                          std::to_string(dim_));
  }
  require_finite(f, "SdeSystem drift");
  return f;
}

Matrix SdeSystem::diffusion(const Vector& x, double t) const {
  Matrix s = diffusion_(x, t);
  if (s.rows() != dim_ || s.cols() != dim_) {
    throw InvalidArgument("SdeSystem: diffusion returned " +
                          std::to_string(s.rows()) + "x" +
                          std::to_string(s.cols()) + ", expected " +
                          std::to_string(dim_) + "x" + std::to_string(dim_));
  }
  require_finite(s, "SdeSystem diffusion");
  return s;
}

Matrix SdeSystem::drift_jacobian(const Vector& x) const {
  if (jacobian_) {
    Matrix j = jacobian_(x);
    if (j.rows() != dim_ || j.cols() != dim_) {
      throw InvalidArgument("SdeSystem: Jacobian callback has wrong shape");
    }
    require_finite(j, "SdeSystem Jacobian");
    return j;
  }
  const double h = std::max(1e-6, 1e-7 * x.norm());
  Matrix j(dim_, dim_);
  Vector probe = x;
  for (int k = 0; k < dim_; ++k) {
    probe(k) = x(k) + h;
    const Vector forward = drift(probe);
    probe(k) = x(k) - h;
    const Vector backward = drift(probe);
    probe(k) = x(k);
    j.col(k) = (forward - backward) / (2.0 * h);
  }
  return j;
}

SdeSystem make_linear_mean_reverting_system(const Matrix& a, const Vector& mu,
                                            double sigma) {
  require_square(a, "linear drift matrix");
  require_finite(a, "linear drift matrix");
  const int dim = static_cast<int>(a.rows());
  if (mu.size() != dim) {
    throw InvalidArgument("linear drift: mu has wrong dimension");
  }
  return SdeSystem::with_additive_noise(
      dim, [a, mu](const Vector& x) -> Vector { return a * (mu - x); },
      sigma * Matrix::Identity(dim, dim),
      [a](const Vector&) -> Matrix { return -a; });
}

SdeSystem make_scalar_linear_system(double a, double sigma, int dim) {
  return SdeSystem::with_additive_noise(
      dim, [a](const Vector& x) -> Vector { return a * x; },
      sigma * Matrix::Identity(dim, dim), [a, dim](const Vector&) -> Matrix {
        return a * Matrix::Identity(dim, dim);
      });
}

SdeSystem make_gradient_quartic_system(int dim, double sigma) {
  return SdeSystem::with_additive_noise(
      dim,
      [](const Vector& x) -> Vector { return -x - x.cwiseProduct(x).cwiseProduct(x); },
      sigma * Matrix::Identity(dim, dim), [](const Vector& x) -> Matrix {
        Vector diag = -Vector::Ones(x.size()) - 3.0 * x.cwiseProduct(x);
        return diag.asDiagonal();
      });
}

void SamplingBox::validate() const {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw InvalidArgument("SamplingBox: lower/upper must be non-empty and of "
                          "equal dimension");
  }
  require_finite(lower, "SamplingBox lower");
  require_finite(upper, "SamplingBox upper");
  if (!(lower.array() < upper.array()).all()) {
    throw InvalidArgument("SamplingBox: lower < upper must hold componentwise");
  }
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw InvalidArgument("SamplingBox: t_max must be positive and finite");
  }
  if (n_samples < 1) {
    throw InvalidArgument("SamplingBox: n_samples must be positive");
  }
}

SamplingBox::Point SamplingBox::sample_point(int i) const {
  RngStream stream(derive_key(seed, "box/point"), static_cast<std::uint64_t>(i));
  Point p{Vector(lower.size()), 0.0};
  for (Eigen::Index k = 0; k < lower.size(); ++k) {
    p.x(k) = lower(k) + stream.uniform() * (upper(k) - lower(k));
  }
  p.t = stream.uniform() * t_max;
  return p;
}

SamplingBox::Pair SamplingBox::sample_pair(int i) const {
  RngStream stream(derive_key(seed, "box/pair"), static_cast<std::uint64_t>(i));
  Pair p{Vector(lower.size()), Vector(lower.size()), 0.0};
  for (Eigen::Index k = 0; k < lower.size(); ++k) {
    p.x(k) = lower(k) + stream.uniform() * (upper(k) - lower(k));
  }
  for (Eigen::Index k = 0; k < lower.size(); ++k) {
    p.y(k) = lower(k) + stream.uniform() * (upper(k) - lower(k));
  }
  p.t = stream.uniform() * t_max;
  return p;
}

namespace {

void check_box(const SdeSystem& system, const SamplingBox& box) {
  box.validate();
  if (box.dim() != system.dim()) {
    throw InvalidArgument("SamplingBox dimension " + std::to_string(box.dim()) +
                          " does not match system dimension " +
                          std::to_string(system.dim()));
  }
}

}  // namespace

double estimate_noise_trace_bound(const SdeSystem& system,
                                  const MetricField& metric,
                                  const SamplingBox& box) {
  check_box(system, box);
  if (metric.dim() != system.dim()) {
    throw InvalidArgument("metric dimension does not match system");
  }
  double best = 0.0;
  for (int i = 0; i < box.n_samples; ++i) {
    const auto p = box.sample_point(i);
    const Matrix s = system.diffusion(p.x, p.t);
    const double value = (s.transpose() * metric.metric(p.t).matrix() * s).trace();
    best = std::max(best, value);
  }
  return best;
}

double estimate_ellipticity(const SdeSystem& system, const SamplingBox& box) {
  check_box(system, box);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < box.n_samples; ++i) {
    const auto p = box.sample_point(i);
    const Matrix s = system.diffusion(p.x, p.t);
    best = std::min(best, lambda_min(SymmetricMatrix(s * s.transpose())));
  }
  return best;
}

GrowthLipschitz estimate_growth_lipschitz(const SdeSystem& system,
                                          const SamplingBox& box) {
  check_box(system, box);
  if (box.n_samples < 2) {
    throw InvalidArgument("estimate_growth_lipschitz: n_samples must be >= 2");
  }
  GrowthLipschitz out;
  for (int i = 0; i < box.n_samples; ++i) {
    const auto p = box.sample_point(i);
    const double growth =
        (system.drift(p.x).norm() + system.diffusion(p.x, p.t).norm()) /
        (1.0 + p.x.norm());
    out.k1 = std::max(out.k1, growth);

    const auto q = box.sample_pair(i);
    const double gap = (q.x - q.y).norm();
    if (gap < 1e-9) continue;
    const double lip =
        ((system.drift(q.x) - system.drift(q.y)).norm() +
         (system.diffusion(q.x, q.t) - system.diffusion(q.y, q.t)).norm()) /
        gap;
    out.k2 = std::max(out.k2, lip);
  }
  return out;
}

RegularityReport estimate_regularity(const SdeSystem& system,
                                     const MetricField& metric,
                                     const SamplingBox& box) {
  RegularityReport report;
  report.c_sigma_hat = estimate_noise_trace_bound(system, metric, box);
  report.c_hat = estimate_ellipticity(system, box);
  const GrowthLipschitz gl = estimate_growth_lipschitz(system, box);
  report.k1_hat = gl.k1;
  report.k2_hat = gl.k2;
  report.n_samples = box.n_samples;
  report.box = box;
  return report;
}

}  // namespace sconlab
