#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "sconlab/metric.h"
#include "sconlab/numerics.h"

namespace sconlab {

/// The Itô SDE dX = f(X) dt + sigma(X, t) dB in R^d with square diffusion.
class SdeSystem {
 public:
  using DriftFn = std::function<Vector(const Vector&)>;
  using DiffusionFn = std::function<Matrix(const Vector&, double)>;
  using JacobianFn = std::function<Matrix(const Vector&)>;

  SdeSystem(int dim, DriftFn drift, DiffusionFn diffusion,
            JacobianFn jacobian = {});

  /// System with state-independent diffusion `sigma` (additive noise). The
  /// simulator skips re-evaluating the diffusion on every step.
  static SdeSystem with_additive_noise(int dim, DriftFn drift,
                                       const Matrix& sigma,
                                       JacobianFn jacobian = {});

  int dim() const { return dim_; }

  /// f(x); throws InvalidArgument on a wrong-sized or non-finite result.
  Vector drift(const Vector& x) const;
  /// sigma(x, t); throws InvalidArgument unless the result is finite d x d.
  Matrix diffusion(const Vector& x, double t) const;

  /// Analytic Jacobian if one was supplied, else central differences with
  /// per-coordinate step h = max(1e-6, 1e-7 * ||x||).
  Matrix drift_jacobian(const Vector& x) const;
  bool has_analytic_jacobian() const { return static_cast<bool>(jacobian_); }

  const std::optional<Matrix>& additive_noise() const {
    return additive_noise_;
  }

 private:
  int dim_;
  DriftFn drift_;
  DiffusionFn diffusion_;
  JacobianFn jacobian_;
  std::optional<Matrix> additive_noise_;
};

/// f(x) = A (mu - x), sigma(x, t) = sigma * I.
SdeSystem make_linear_mean_reverting_system(const Matrix& a, const Vector& mu,
                                            double sigma);
/// f(x) = a * x componentwise, sigma(x, t) = sigma * I.
SdeSystem make_scalar_linear_system(double a, double sigma, int dim = 1);
/// f(x) = -x - x^3 componentwise, sigma(x, t) = sigma * I.
SdeSystem make_gradient_quartic_system(int dim, double sigma);

/// Bounded region [lower, upper] x [0, t_max] over which suprema and infima
/// in the regularity conditions are estimated by uniform sampling. Sample i
/// depends only on (seed, i), so a larger n_samples with the same seed
/// visits a superset of the points.
struct SamplingBox {
  Vector lower;
  Vector upper;
  double t_max = 1.0;
  int n_samples = 1000;
  std::uint64_t seed = 0;

  void validate() const;
  int dim() const { return static_cast<int>(lower.size()); }

  struct Point {
    Vector x;
    double t;
  };
  struct Pair {
    Vector x;
    Vector y;
    double t;
  };
  Point sample_point(int i) const;
  Pair sample_pair(int i) const;
};

/// Sampled estimates of the noise and regularity constants. All values are
/// extrema over the box samples, hence lower bounds on the true suprema
/// (upper bound for c_hat); they are not global certificates.
struct RegularityReport {
  double c_sigma_hat = 0.0;
  double c_hat = 0.0;
  double k1_hat = 0.0;
  double k2_hat = 0.0;
  int n_samples = 0;
  SamplingBox box;
};

/// max over samples of trace(sigma^T M(t) sigma).
double estimate_noise_trace_bound(const SdeSystem& system,
                                  const MetricField& metric,
                                  const SamplingBox& box);

/// min over samples of lambda_min(sigma sigma^T). A non-positive value flags
/// a sampled point where ellipticity fails.
double estimate_ellipticity(const SdeSystem& system, const SamplingBox& box);

struct GrowthLipschitz {
  double k1 = 0.0;
  double k2 = 0.0;
};

/// K1 from single points, K2 from n_samples independent pairs; pairs closer
/// than 1e-9 are skipped.
GrowthLipschitz estimate_growth_lipschitz(const SdeSystem& system,
                                          const SamplingBox& box);

RegularityReport estimate_regularity(const SdeSystem& system,
                                     const MetricField& metric,
                                     const SamplingBox& box);

}  // namespace sconlab
