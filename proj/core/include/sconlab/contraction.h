#pragma once

#include <optional>

#include <nlohmann/json.hpp>

#include "sconlab/metric.h"
#include "sconlab/model.h"
#include "sconlab/numerics.h"

namespace sconlab {

/// F(x, t) = (dTheta/dt + Theta * df/dx) * Theta^{-1}.
/// Throws SingularMatrixError if Theta(t) is singular.
Matrix generalized_jacobian(const SdeSystem& system, const MetricField& metric,
                            const Vector& x, double t);

struct WorstPoint {
  Vector x;
  double t = 0.0;
};

struct ContractionRate {
  /// -max over samples of lambda_max(sym F). Positive iff every sampled
  /// point contracts.
  double beta_hat = 0.0;
  WorstPoint worst_point;
};

ContractionRate estimate_contraction_rate(const SdeSystem& system,
                                          const MetricField& metric,
                                          const SamplingBox& box);

/// min of lambda_min(M(t)) on n_samples equally spaced times covering
/// [0, t_max] including both ends. A declared floor on the metric is
/// returned instead when it does not exceed the sampled minimum (relative
/// slack 1e-8). Throws NumericError if the sampled minimum is <= 0.
double estimate_metric_floor(const MetricField& metric, double t_max,
                             int n_samples);

/// Values within this distance of zero count as non-contracting.
inline constexpr double kContractionTieTolerance = 1e-10;

struct ContractionCertificate {
  double beta = 0.0;
  double alpha = 0.0;
  double c_sigma = 0.0;
  double c_ellip = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  bool contracting = false;
  SamplingBox box;
  std::optional<WorstPoint> worst_point;
};

/// Sampled certification over `box`: contraction rate, metric floor, and the
/// regularity constants. Scoped to the box, never a global statement.
ContractionCertificate certify(const SdeSystem& system,
                               const MetricField& metric,
                               const SamplingBox& box);

nlohmann::json to_json(const SamplingBox& box);
SamplingBox sampling_box_from_json(const nlohmann::json& j);

/// {beta, alpha, c_sigma, c_ellip, k1, k2, contracting,
///  box: {lower, upper, t_max, n_samples, seed}, worst_point}
nlohmann::json to_json(const ContractionCertificate& cert);
ContractionCertificate certificate_from_json(const nlohmann::json& j);

}  // namespace sconlab
