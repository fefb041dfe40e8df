#include "sconlab/contraction.h"

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "sconlab/errors.h"

namespace sconlab {

Matrix generalized_jacobian(const SdeSystem& system, const MetricField& metric,
                            const Vector& x, double t) {
  if (metric.dim() != system.dim()) {
    throw InvalidArgument("generalized_jacobian: metric dimension mismatch");
  }
  const Matrix theta = metric.theta(t);
  const Matrix numerator =
      metric.theta_dot(t) + theta * system.drift_jacobian(x);
  // F = N Theta^{-1}  <=>  Theta^T F^T = N^T
  try {
    return solve(theta.transpose(), numerator.transpose()).transpose();
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(
        "metric Theta(t) is singular at t=" + std::to_string(t),
        e.condition_estimate());
  }
}

ContractionRate estimate_contraction_rate(const SdeSystem& system,
                                          const MetricField& metric,
                                          const SamplingBox& box) {
  box.validate();
  if (box.dim() != system.dim()) {
    throw InvalidArgument("estimate_contraction_rate: box dimension mismatch");
  }
  double worst = -std::numeric_limits<double>::infinity();
  ContractionRate out;
  for (int i = 0; i < box.n_samples; ++i) {
    const auto p = box.sample_point(i);
    const double lmax =
        lambda_max(symmetric_part(generalized_jacobian(system, metric, p.x, p.t)));
    if (lmax > worst) {
      worst = lmax;
      out.worst_point = {p.x, p.t};
    }
  }
  out.beta_hat = -worst;
  return out;
}

double estimate_metric_floor(const MetricField& metric, double t_max,
                             int n_samples) {
  if (!(t_max >= 0.0) || n_samples < 1) {
    throw InvalidArgument("estimate_metric_floor: invalid time range");
  }
  double floor = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_samples; ++k) {
    const double t =
        n_samples == 1 ? 0.0 : t_max * static_cast<double>(k) / (n_samples - 1);
    floor = std::min(floor, lambda_min(metric.metric(t)));
  }
  if (!(floor > 0.0)) {
    throw NumericError(
        "metric not uniformly positive definite (sampled min eigenvalue " +
        std::to_string(floor) + ")");
  }
  if (const auto declared = metric.alpha_floor();
      declared && *declared <= floor * (1.0 + 1e-8)) {
    return *declared;
  }
  return floor;
}

ContractionCertificate certify(const SdeSystem& system,
                               const MetricField& metric,
                               const SamplingBox& box) {
  const ContractionRate rate = estimate_contraction_rate(system, metric, box);
  const RegularityReport reg = estimate_regularity(system, metric, box);
  ContractionCertificate cert;
  cert.beta = rate.beta_hat;
  cert.alpha = estimate_metric_floor(metric, box.t_max, box.n_samples);
  cert.c_sigma = reg.c_sigma_hat;
  cert.c_ellip = reg.c_hat;
  cert.k1 = reg.k1_hat;
  cert.k2 = reg.k2_hat;
  cert.contracting = rate.beta_hat > kContractionTieTolerance;
  cert.box = box;
  cert.worst_point = rate.worst_point;
  return cert;
}

namespace {

std::vector<double> to_std(const Vector& v) {
  return {v.data(), v.data() + v.size()};
}

Vector from_std(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

nlohmann::json to_json(const SamplingBox& box) {
  return {{"lower", to_std(box.lower)},
          {"upper", to_std(box.upper)},
          {"t_max", box.t_max},
          {"n_samples", box.n_samples},
          {"seed", box.seed}};
}

SamplingBox sampling_box_from_json(const nlohmann::json& j) {
  SamplingBox box;
  box.lower = from_std(j.at("lower").get<std::vector<double>>());
  box.upper = from_std(j.at("upper").get<std::vector<double>>());
  box.t_max = j.at("t_max").get<double>();
  box.n_samples = j.at("n_samples").get<int>();
  box.seed = j.at("seed").get<std::uint64_t>();
  return box;
}

nlohmann::json to_json(const ContractionCertificate& cert) {
  nlohmann::json j = {{"beta", cert.beta},       {"alpha", cert.alpha},
                      {"c_sigma", cert.c_sigma}, {"c_ellip", cert.c_ellip},
                      {"k1", cert.k1},           {"k2", cert.k2},
                      {"contracting", cert.contracting},
                      {"box", to_json(cert.box)}};
  if (cert.worst_point) {
    j["worst_point"] = {{"x", to_std(cert.worst_point->x)},
                        {"t", cert.worst_point->t}};
  } else {
    j["worst_point"] = nullptr;
  }
  return j;
}

ContractionCertificate certificate_from_json(const nlohmann::json& j) {
  ContractionCertificate cert;
  cert.beta = j.at("beta").get<double>();
  cert.alpha = j.at("alpha").get<double>();
  cert.c_sigma = j.at("c_sigma").get<double>();
  cert.c_ellip = j.at("c_ellip").get<double>();
  cert.k1 = j.at("k1").get<double>();
  cert.k2 = j.at("k2").get<double>();
  cert.contracting = j.at("contracting").get<bool>();
  cert.box = sampling_box_from_json(j.at("box"));
  if (const auto& wp = j.at("worst_point"); !wp.is_null()) {
    cert.worst_point =
        WorstPoint{from_std(wp.at("x").get<std::vector<double>>()),
                   wp.at("t").get<double>()};
  }
  return cert;
}

}  // namespace sconlab
