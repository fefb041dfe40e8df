#pragma once

#include <functional>
#include <optional>

#include "sconlab/numerics.h"

namespace sconlab {

/// Time-varying contraction metric M(t) = Theta(t)^T Theta(t).
class MetricField {
 public:
  using MatrixFn = std::function<Matrix(double)>;

  /// `theta_dot` may be empty, in which case it is approximated by a central
  /// difference with step kThetaDotStep (truncation error O(h^2)).
  MetricField(int dim, MatrixFn theta, MatrixFn theta_dot = {},
              std::optional<double> alpha_floor = std::nullopt);

  static MetricField identity(int dim);
  static MetricField constant(const Matrix& theta);

  int dim() const { return dim_; }
  Matrix theta(double t) const;
  Matrix theta_dot(double t) const;
  SymmetricMatrix metric(double t) const;
  std::optional<double> alpha_floor() const { return alpha_floor_; }
  bool has_analytic_theta_dot() const { return static_cast<bool>(theta_dot_); }

  static constexpr double kThetaDotStep = 1e-6;

 private:
  int dim_;
  MatrixFn theta_;
  MatrixFn theta_dot_;
  std::optional<double> alpha_floor_;
};

}  // namespace sconlab
