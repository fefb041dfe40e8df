#pragma once

#include "sconlab/model.h"
#include "sconlab/numerics.h"
#include "sconlab/wasserstein.h"

namespace sconlab {

/// dX = A (mu - X) dt + sigma dB with A + A^T positive definite, sigma > 0.
class OuSystem {
 public:
  OuSystem(Matrix a, Vector mu_target, double sigma);

  int dim() const { return static_cast<int>(a_.rows()); }
  const Matrix& a() const { return a_; }
  const Vector& mu_target() const { return mu_target_; }
  double sigma() const { return sigma_; }

  /// Stationary covariance: the solution S of A S + S A^T = sigma^2 I.
  const SymmetricMatrix& stationary_cov() const { return stationary_cov_; }

  SdeSystem to_sde() const;

 private:
  Matrix a_;
  Vector mu_target_;
  double sigma_;
  SymmetricMatrix stationary_cov_;
};

struct OuConstants {
  double alpha = 1.0;
  double beta = 0.0;     // lambda_min(A + A^T) / 2
  double c_sigma = 0.0;  // d * sigma^2

  /// sqrt(c_sigma / beta) / sqrt(alpha): the residual the W2 bound decays to.
  double asymptotic_bound() const;
};

/// e^{-At} mean0 + (I - e^{-At}) mu.
Vector ou_mean(const OuSystem& sys, double t, const Vector& mean0);

/// Covariance of X_t given Cov(X_0) = cov0:
///   e^{-At} cov0 e^{-A^T t} + integral_0^t e^{-As} sigma^2 e^{-A^T s} ds,
/// evaluated as S + e^{-At} (cov0 - S) e^{-A^T t} with S the stationary
/// covariance. When A commutes with A^T this equals
///   e^{-At} cov0 e^{-A^T t} + sigma^2 (A + A^T)^{-1} (I - e^{-(A + A^T) t}).
SymmetricMatrix ou_cov(const OuSystem& sys, double t, const SymmetricMatrix& cov0);

GaussianLaw ou_law(const OuSystem& sys, double t, const GaussianLaw& law0);
GaussianLaw ou_stationary_law(const OuSystem& sys);

/// Exact W2 between the time-t laws of two solutions started from
/// law0_mu and law0_nu.
double ou_exact_w2(const OuSystem& sys, double t, const GaussianLaw& law0_mu,
                   const GaussianLaw& law0_nu);

/// Contraction constants in the identity metric.
OuConstants ou_constants(const OuSystem& sys);

}  // namespace sconlab
