#include "sconlab/metric.h"

#include <string>
#include <utility>

#include "sconlab/errors.h"

namespace sconlab {

MetricField::MetricField(int dim, MatrixFn theta, MatrixFn theta_dot,
                         std::optional<double> alpha_floor)
    : dim_(dim),
      theta_(std::move(theta)),
      theta_dot_(std::move(theta_dot)),
      alpha_floor_(alpha_floor) {
  if (dim_ < 1) throw InvalidArgument("MetricField: dim must be positive");
  if (!theta_) throw InvalidArgument("MetricField: theta is required");
  if (alpha_floor_ && !(*alpha_floor_ > 0.0)) {
    throw InvalidArgument("MetricField: declared alpha floor must be > 0");
  }
}

MetricField MetricField::identity(int dim) {
  const Matrix ident = Matrix::Identity(dim, dim);
  const Matrix zero = Matrix::Zero(dim, dim);
  return MetricField(
      dim, [ident](double) { return ident; },
      [zero](double) { return zero; }, 1.0);
}

MetricField MetricField::constant(const Matrix& theta) {
  require_square(theta, "MetricField::constant");
  require_finite(theta, "MetricField::constant");
  const int dim = static_cast<int>(theta.rows());
  const Matrix zero = Matrix::Zero(dim, dim);
  return MetricField(
      dim, [theta](double) { return theta; },
      [zero](double) { return zero; });
}

namespace {

void check_shape(const Matrix& m, int dim, const char* what, double t) {
  if (m.rows() != dim || m.cols() != dim) {
    throw InvalidArgument(std::string("MetricField: ") + what +
                          " has wrong shape at t=" + std::to_string(t));
  }
  require_finite(m, what);
}

}  // namespace

Matrix MetricField::theta(double t) const {
  Matrix m = theta_(t);
  check_shape(m, dim_, "theta", t);
  return m;
}

Matrix MetricField::theta_dot(double t) const {
  if (theta_dot_) {
    Matrix m = theta_dot_(t);
    check_shape(m, dim_, "theta_dot", t);
    return m;
  }
  const double h = kThetaDotStep;
  return (theta(t + h) - theta(t - h)) / (2.0 * h);
}

SymmetricMatrix MetricField::metric(double t) const {
  const Matrix th = theta(t);
  return SymmetricMatrix(th.transpose() * th);
}

}  // namespace sconlab
