#include "sconlab/ou.h"

#include <cmath>
#include <string>
#include <utility>

#include "sconlab/errors.h"

namespace sconlab {

namespace {

// Solves A S + S A^T = Q through the Kronecker form
// (I (x) A + A (x) I) vec(S) = vec(Q). Fine for the dimensions used here.
SymmetricMatrix solve_lyapunov(const Matrix& a, const Matrix& q) {
  const Eigen::Index d = a.rows();
  const Matrix ident = Matrix::Identity(d, d);
  Matrix kron = Matrix::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      kron.block(i * d, j * d, d, d) += ident(i, j) * a + a(i, j) * ident;
    }
  }
  const Matrix rhs = Eigen::Map<const Vector>(q.data(), d * d);
  const Vector s = solve(kron, rhs);
  return SymmetricMatrix(Eigen::Map<const Matrix>(s.data(), d, d));
}

}  // namespace

OuSystem::OuSystem(Matrix a, Vector mu_target, double sigma)
    : a_(std::move(a)), mu_target_(std::move(mu_target)), sigma_(sigma) {
  require_square(a_, "OuSystem A");
  require_finite(a_, "OuSystem A");
  require_finite(mu_target_, "OuSystem mu");
  if (mu_target_.size() != a_.rows()) {
    throw InvalidArgument("OuSystem: mu has dimension " +
                          std::to_string(mu_target_.size()) + ", A is " +
                          std::to_string(a_.rows()) + "x" +
                          std::to_string(a_.rows()));
  }
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
    throw InvalidArgument("OuSystem: sigma must be positive");
  }
  const double lmin = lambda_min(SymmetricMatrix(a_ + a_.transpose()));
  if (!(lmin > 0.0)) {
    throw InvalidArgument(
        "OuSystem: A is not strictly positive definite (lambda_min(A+A^T) = " +
        std::to_string(lmin) + ")");
  }
  const int d = dim();
  stationary_cov_ =
      solve_lyapunov(a_, sigma_ * sigma_ * Matrix::Identity(d, d));
}

SdeSystem OuSystem::to_sde() const {
  return make_linear_mean_reverting_system(a_, mu_target_, sigma_);
}

double OuConstants::asymptotic_bound() const {
  return std::sqrt(c_sigma / beta) / std::sqrt(alpha);
}

Vector ou_mean(const OuSystem& sys, double t, const Vector& mean0) {
  if (mean0.size() != sys.dim()) {
    throw InvalidArgument("ou_mean: mean0 has wrong dimension");
  }
  if (!std::isfinite(t) || t < 0.0) {
    throw InvalidArgument("ou_mean: t must be finite and >= 0");
  }
  const Matrix decay = expm(-sys.a() * t);
  const Matrix ident = Matrix::Identity(sys.dim(), sys.dim());
  return decay * mean0 + (ident - decay) * sys.mu_target();
}

SymmetricMatrix ou_cov(const OuSystem& sys, double t, const SymmetricMatrix& cov0) {
  if (cov0.dim() != sys.dim()) {
    throw InvalidArgument("ou_cov: cov0 has wrong dimension");
  }
  if (!std::isfinite(t) || t < 0.0) {
    throw InvalidArgument("ou_cov: t must be finite and >= 0");
  }
  require_psd(cov0, "ou_cov cov0");
  const Matrix decay = expm(-sys.a() * t);
  const Matrix& stationary = sys.stationary_cov().matrix();
  return SymmetricMatrix(stationary +
                         decay * (cov0.matrix() - stationary) * decay.transpose());
}

GaussianLaw ou_law(const OuSystem& sys, double t, const GaussianLaw& law0) {
  return {ou_mean(sys, t, law0.mean), ou_cov(sys, t, law0.cov)};
}

GaussianLaw ou_stationary_law(const OuSystem& sys) {
  return {sys.mu_target(), sys.stationary_cov()};
}

double ou_exact_w2(const OuSystem& sys, double t, const GaussianLaw& law0_mu,
                   const GaussianLaw& law0_nu) {
  return w2_gaussian(ou_law(sys, t, law0_mu), ou_law(sys, t, law0_nu));
}

OuConstants ou_constants(const OuSystem& sys) {
  OuConstants c;
  c.alpha = 1.0;
  c.beta = 0.5 * lambda_min(SymmetricMatrix(sys.a() + sys.a().transpose()));
  c.c_sigma = sys.dim() * sys.sigma() * sys.sigma();
  return c;
}

}  // namespace sconlab
