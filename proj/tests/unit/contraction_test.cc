#include "sconlab/contraction.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "sconlab/errors.h"
#include "test_util.h"

namespace sconlab {
namespace {

using testing::RandomInputs;

SamplingBox Box(int d, double half_width, int n_samples, std::uint64_t seed = 3) {
  SamplingBox box;
  box.lower = Vector::Constant(d, -half_width);
  box.upper = Vector::Constant(d, half_width);
  box.t_max = 1.0;
  box.n_samples = n_samples;
  box.seed = seed;
  return box;
}

SdeSystem LinearSystem(const Matrix& a) {
  const int d = static_cast<int>(a.rows());
  return SdeSystem::with_additive_noise(
      d, [a](const Vector& x) -> Vector { return a * x; }, Matrix::Identity(d, d),
      [a](const Vector&) -> Matrix { return a; });
}

std::vector<double> SortedRealParts(const Matrix& m) {
  const Eigen::EigenSolver<Matrix> solver(m);
  std::vector<std::pair<double, double>> values;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    values.emplace_back(solver.eigenvalues()(i).real(), solver.eigenvalues()(i).imag());
  }
  std::sort(values.begin(), values.end());
  std::vector<double> flat;
  for (const auto& [re, im] : values) {
    flat.push_back(re);
    flat.push_back(std::abs(im));
  }
  return flat;
}

TEST(GeneralizedJacobianTest, IdentityMetricGivesDriftJacobian) {
  const SdeSystem system = make_gradient_quartic_system(2, 1.0);
  Vector x(2);
  x << 0.5, -1.0;
  EXPECT_TRUE(generalized_jacobian(system, MetricField::identity(2), x, 0.3)
                  .isApprox(system.drift_jacobian(x)));
}

TEST(GeneralizedJacobianTest, ExponentialMetricAddsIdentity) {
  // Theta(t) = e^t I: dTheta/dt Theta^{-1} = I.
  const MetricField metric(
      2, [](double t) -> Matrix { return std::exp(t) * Matrix::Identity(2, 2); },
      [](double t) -> Matrix { return std::exp(t) * Matrix::Identity(2, 2); });
  const SdeSystem system = make_gradient_quartic_system(2, 1.0);
  Vector x(2);
  x << 0.2, 0.7;
  const Matrix expected = Matrix::Identity(2, 2) + system.drift_jacobian(x);
  EXPECT_LE((generalized_jacobian(system, metric, x, 0.8) - expected).norm(), 1e-12);
}

TEST(GeneralizedJacobianTest, ExponentialMetricWithFiniteDifferenceDerivative) {
  const MetricField metric(
      2, [](double t) -> Matrix { return std::exp(t) * Matrix::Identity(2, 2); });
  const SdeSystem system = make_gradient_quartic_system(2, 1.0);
  const Vector x = Vector::Constant(2, 0.3);
  const Matrix expected = Matrix::Identity(2, 2) + system.drift_jacobian(x);
  // Central difference with h = 1e-6 has O(h^2) truncation and O(eps/h) round-off.
  EXPECT_LE((generalized_jacobian(system, metric, x, 0.5) - expected).norm(), 1e-8);
}

TEST(GeneralizedJacobianTest, ConstantMetricIsSimilarityTransform) {
  RandomInputs rng(21);
  const Matrix a = rng.matrix(3, 3);
  const Matrix c = rng.matrix(3, 3) + 3.0 * Matrix::Identity(3, 3);
  const Matrix f =
      generalized_jacobian(LinearSystem(a), MetricField::constant(c), Vector::Zero(3), 0.0);
  EXPECT_LE((f - c * a * c.inverse()).norm(), 1e-10);
}

TEST(GeneralizedJacobianTest, SpectrumPreservedUnderSimilarity) {
  RandomInputs rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = rng.integer(1, 5);
    const Matrix a = rng.matrix(d, d);
    const Matrix c = rng.matrix(d, d) + 2.5 * Matrix::Identity(d, d);
    const Matrix f =
        generalized_jacobian(LinearSystem(a), MetricField::constant(c), Vector::Zero(d), 0.0);
    const auto expected = SortedRealParts(a);
    const auto actual = SortedRealParts(f);
    ASSERT_EQ(expected.size(), actual.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      EXPECT_NEAR(actual[i], expected[i], 1e-8) << "trial " << trial;
    }
  }
}

TEST(GeneralizedJacobianTest, SingularThetaNamesTime) {
  const MetricField metric(2, [](double) -> Matrix { return Matrix::Zero(2, 2); });
  try {
    generalized_jacobian(make_gradient_quartic_system(2, 1.0), metric, Vector::Zero(2), 0.25);
    FAIL() << "expected SingularMatrixError";
  } catch (const SingularMatrixError& e) {
    EXPECT_NE(std::string(e.what()).find("t=0.25"), std::string::npos) << e.what();
  }
}

TEST(ContractionRateTest, NegativeIdentityDrift) {
  const SdeSystem system = make_scalar_linear_system(-1.0, 1.0, 3);
  const ContractionRate rate = estimate_contraction_rate(system, MetricField::identity(3), Box(3, 2.0, 50));
  EXPECT_NEAR(rate.beta_hat, 1.0, 1e-14);
}

TEST(ContractionRateTest, MeanRevertingLinearDrift) {
  Matrix a(2, 2);
  a << 2.0, 1.5, -0.5, 1.0;
  const double expected = 0.5 * lambda_min(SymmetricMatrix(a + a.transpose()));
  const SdeSystem system = make_linear_mean_reverting_system(a, Vector::Ones(2), 0.5);
  EXPECT_NEAR(estimate_contraction_rate(system, MetricField::identity(2), Box(2, 1.0, 20)).beta_hat,
              expected, 1e-12);
}

TEST(ContractionRateTest, ExpandingDriftNotContracting) {
  const SdeSystem system = make_scalar_linear_system(1.0, 1.0, 2);
  const SamplingBox box = Box(2, 1.0, 20);
  EXPECT_NEAR(estimate_contraction_rate(system, MetricField::identity(2), box).beta_hat, -1.0,
              1e-14);
  EXPECT_FALSE(certify(system, MetricField::identity(2), box).contracting);
}

TEST(ContractionRateTest, ExactQuadraticPotential) {
  // f = grad phi with phi = -(beta / 2) ||x||^2, i.e. f(x) = -beta x, using
  // the finite-difference Jacobian.
  const double beta = 0.37;
  const SdeSystem system(
      3, [beta](const Vector& x) -> Vector { return -beta * x; },
      [](const Vector&, double) -> Matrix { return Matrix::Identity(3, 3); });
  EXPECT_NEAR(estimate_contraction_rate(system, MetricField::identity(3), Box(3, 5.0, 200)).beta_hat,
              beta, 1e-6);
}

TEST(ContractionRateTest, WorstPointIsArgmax) {
  // For f = -x - x^3 the least contracting point is nearest the origin.
  const SdeSystem system = make_gradient_quartic_system(2, 1.0);
  const SamplingBox box = Box(2, 2.0, 300);
  const ContractionRate rate = estimate_contraction_rate(system, MetricField::identity(2), box);
  double best = -1e300;
  for (int i = 0; i < box.n_samples; ++i) {
    const auto p = box.sample_point(i);
    best = std::max(best, lambda_max(symmetric_part(system.drift_jacobian(p.x))));
  }
  EXPECT_EQ(rate.beta_hat, -best);
  EXPECT_EQ(-lambda_max(symmetric_part(system.drift_jacobian(rate.worst_point.x))), rate.beta_hat);
}

TEST(ContractionRateTest, NonincreasingAsBoxGrows) {
  const SdeSystem system(
      2, [](const Vector& x) -> Vector { return -x + 0.1 * x.cwiseProduct(x).cwiseProduct(x); },
      [](const Vector&, double) -> Matrix { return Matrix::Identity(2, 2); });
  double previous = 1e300;
  for (double width : {0.5, 1.0, 1.5, 2.0}) {
    // Same seed: nested boxes scale the same unit samples outwards.
    const double beta =
        estimate_contraction_rate(system, MetricField::identity(2), Box(2, width, 500, 8)).beta_hat;
    EXPECT_LE(beta, previous);
    previous = beta;
  }
}

TEST(MetricFloorTest, IdentityAndDiagonal) {
  EXPECT_EQ(estimate_metric_floor(MetricField::identity(3), 1.0, 10), 1.0);
  Matrix theta = Matrix::Zero(2, 2);
  theta(0, 0) = 2.0;
  theta(1, 1) = 3.0;
  EXPECT_NEAR(estimate_metric_floor(MetricField::constant(theta), 1.0, 10), 4.0, 1e-14);
}

TEST(MetricFloorTest, TimeVaryingMinimumAtEndpoints) {
  // lambda_min(M(t)) = 1 + sin^2(t) on [0, pi].
  const MetricField metric(2, [](double t) -> Matrix {
    Matrix theta = Matrix::Zero(2, 2);
    theta(0, 0) = std::sqrt(1.0 + std::sin(t) * std::sin(t));
    theta(1, 1) = 2.0;
    return theta;
  });
  EXPECT_NEAR(estimate_metric_floor(metric, std::numbers::pi, 101), 1.0, 1e-12);
}

TEST(MetricFloorTest, DeclaredFloorUsedOnlyWhenConsistent) {
  const auto theta = [](double) -> Matrix { return 2.0 * Matrix::Identity(2, 2); };
  const MetricField consistent(2, theta, {}, 3.5);
  EXPECT_EQ(estimate_metric_floor(consistent, 1.0, 5), 3.5);
  const MetricField inconsistent(2, theta, {}, 5.0);
  EXPECT_NEAR(estimate_metric_floor(inconsistent, 1.0, 5), 4.0, 1e-14);
}

TEST(MetricFloorTest, SingularMetricRejected) {
  const MetricField metric(2, [](double t) -> Matrix {
    Matrix theta = Matrix::Identity(2, 2);
    theta(1, 1) = t - 0.5;
    return theta;
  });
  EXPECT_THROW(estimate_metric_floor(metric, 1.0, 3), NumericError);
}

TEST(CertifyTest, OuExample) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  const SdeSystem system = make_linear_mean_reverting_system(a, Vector::Zero(2), 0.5);
  const ContractionCertificate cert = certify(system, MetricField::identity(2), Box(2, 2.0, 200));
  EXPECT_NEAR(cert.beta, 1.0, 1e-12);
  EXPECT_EQ(cert.alpha, 1.0);
  EXPECT_NEAR(cert.c_sigma, 0.5, 1e-12);
  EXPECT_NEAR(cert.c_ellip, 0.25, 1e-12);
  EXPECT_TRUE(cert.contracting);
  EXPECT_TRUE(cert.worst_point.has_value());
}

TEST(CertifyTest, NoiseFreeContractingSystem) {
  const SdeSystem system = make_gradient_quartic_system(2, 0.0);
  const ContractionCertificate cert = certify(system, MetricField::identity(2), Box(2, 1.0, 100));
  EXPECT_EQ(cert.c_sigma, 0.0);
  EXPECT_TRUE(cert.contracting);
  EXPECT_GE(cert.beta, 1.0 - 1e-12);
}

TEST(CertifyTest, TieCountsAsNotContracting) {
  const SdeSystem system = make_scalar_linear_system(0.0, 1.0, 2);
  EXPECT_FALSE(certify(system, MetricField::identity(2), Box(2, 1.0, 10)).contracting);
  const SdeSystem barely = make_scalar_linear_system(-1e-11, 1.0, 2);
  EXPECT_FALSE(certify(barely, MetricField::identity(2), Box(2, 1.0, 10)).contracting);
}

TEST(CertifyTest, AlphaNotAboveSampledMetricEigenvalues) {
  const MetricField metric(2, [](double t) -> Matrix {
    return (1.0 + 0.5 * std::cos(3.0 * t)) * Matrix::Identity(2, 2);
  });
  const SamplingBox box = Box(2, 1.0, 50);
  const ContractionCertificate cert = certify(make_gradient_quartic_system(2, 1.0), metric, box);
  for (int i = 0; i < box.n_samples; ++i) {
    EXPECT_LE(cert.alpha, lambda_min(metric.metric(box.sample_point(i).t)) + 1e-12);
  }
}

TEST(CertificateJsonTest, ExactFieldsAndRoundTrip) {
  const SdeSystem system = make_gradient_quartic_system(2, 0.3);
  const ContractionCertificate cert = certify(system, MetricField::identity(2), Box(2, 1.0, 30));
  const nlohmann::json j = to_json(cert);
  std::vector<std::string> keys;
  for (const auto& [key, value] : j.items()) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  EXPECT_EQ(keys, (std::vector<std::string>{"alpha", "beta", "box", "c_ellip", "c_sigma", "contracting",
                                            "k1", "k2", "worst_point"}));
  std::vector<std::string> box_keys;
  for (const auto& [key, value] : j.at("box").items()) box_keys.push_back(key);
  std::sort(box_keys.begin(), box_keys.end());
  EXPECT_EQ(box_keys, (std::vector<std::string>{"lower", "n_samples", "seed", "t_max", "upper"}));

  const ContractionCertificate back = certificate_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.beta, cert.beta);
  EXPECT_EQ(back.alpha, cert.alpha);
  EXPECT_EQ(back.c_sigma, cert.c_sigma);
  EXPECT_EQ(back.k2, cert.k2);
  EXPECT_EQ(back.contracting, cert.contracting);
  EXPECT_EQ(back.box.seed, cert.box.seed);
  ASSERT_TRUE(back.worst_point.has_value());
  EXPECT_EQ(back.worst_point->x, cert.worst_point->x);
}

TEST(CertificateJsonTest, MissingWorstPointIsNull) {
  ContractionCertificate cert;
  cert.box = Box(1, 1.0, 2);
  const nlohmann::json j = to_json(cert);
  EXPECT_TRUE(j.at("worst_point").is_null());
  EXPECT_FALSE(certificate_from_json(j).worst_point.has_value());
}

}  // namespace
}  // namespace sconlab
