#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "sconlab/contraction.h"
#include "sconlab/metric.h"
#include "sconlab/model.h"
#include "sconlab/ou.h"
#include "sconlab/simulate.h"

namespace sconlab {

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

struct OuFamily {
  Matrix a;
  Vector mu;
  double sigma = 1.0;
};

/// f(x) = a x componentwise.
struct ScalarLinearFamily {
  double a = -1.0;
  double sigma = 1.0;
  int dim = 1;
};

/// f(x) = -x - x^3 componentwise.
struct GradientQuarticFamily {
  int dim = 1;
  double sigma = 1.0;
};

using SystemSpec = std::variant<OuFamily, ScalarLinearFamily, GradientQuarticFamily>;

struct MetricSpec {
  /// Constant Theta; identity when empty.
  std::optional<Matrix> theta;
};

struct AssignmentMethod {};
struct SinkhornMethod {
  double epsilon = 0.0;
  double tol = 1e-9;
  long max_iter = 100000;
};
using W2Method = std::variant<AssignmentMethod, SinkhornMethod>;

struct AnalyticCertificate {};
struct SampledCertificate {
  SamplingBox box;
};
using CertificateSource = std::variant<AnalyticCertificate, SampledCertificate>;

/// Grid settings; t_max defaults to 6 / beta and the snapshot list to
/// TimeGrid::geometric. Time zero is always included.
struct GridSpec {
  double dt = 1e-3;
  std::optional<double> t_max;
  std::optional<std::vector<double>> snapshot_times;
};

struct ExperimentConfig {
  SystemSpec system;
  MetricSpec metric;
  InitialSampler mu0 = InitialSampler::point(Vector::Zero(1));
  InitialSampler nu0 = InitialSampler::point(Vector::Zero(1));
  /// Both ensembles draw initial states from one shared stream.
  bool coupled_init = false;
  GridSpec grid;
  int n_traj = 1000;
  std::uint64_t master_seed = 0;
  W2Method w2 = AssignmentMethod{};
  CertificateSource certificate = AnalyticCertificate{};
  unsigned threads = 1;

  void validate() const;
};

inline constexpr int kMinStatisticalTrajectories = 50;
inline constexpr int kBootstrapGroups = 10;
inline constexpr double kViolationSigmas = 4.0;

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

SdeSystem build_system(const ExperimentConfig& cfg);
MetricField build_metric(const ExperimentConfig& cfg);
/// The OU oracle for OU-family configs.
std::optional<OuSystem> build_ou(const ExperimentConfig& cfg);

/// The certificate the bounds are evaluated with: analytic constants for OU
/// configs, or certify() over the configured box.
ContractionCertificate resolve_certificate(const ExperimentConfig& cfg);
TimeGrid resolve_grid(const ExperimentConfig& cfg, double beta);

// ---------------------------------------------------------------------------
// Bounds and reports
// ---------------------------------------------------------------------------

/// alpha^{-1/2} (e^{-beta t} w2_0 + sqrt(c_sigma / beta)).
double theoretical_bound_w2(double t, double w2_0, double alpha, double beta,
                            double c_sigma);
/// (1 / alpha) (e^{-2 beta t} ms_0 + c_sigma / beta).
double theoretical_bound_ms(double t, double ms_0, double alpha, double beta,
                            double c_sigma);

struct BoundRow {
  double t = 0.0;
  double w2_empirical = 0.0;
  std::optional<double> w2_exact;
  double ms_gap = 0.0;
  double bound_w2 = 0.0;
  double bound_ms = 0.0;
  bool violation_w2 = false;
  bool violation_ms = false;
  /// 4 x bootstrap standard error used for the violation tests.
  double w2_margin = 0.0;
  double ms_margin = 0.0;
};

struct BoundReport {
  std::vector<BoundRow> rows;
  ContractionCertificate certificate;
  std::string certificate_source;  // "analytic" | "sampled"
  double w2_0 = 0.0;
  double ms_0 = 0.0;
  nlohmann::json config;

  bool any_violation() const;
};

/// Simulates both laws, estimates W2 and the mean-square gap at each
/// snapshot and compares them with the bounds. A row is flagged when the
/// empirical value exceeds its bound by more than 4 bootstrap standard
/// errors (10 disjoint sub-ensembles), or when the exact OU distance exceeds
/// the W2 bound at all. Throws Error if the certificate is not contracting.
BoundReport run_experiment(const ExperimentConfig& cfg);

struct DecayFit {
  double rate = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least squares of log(values - floor) against t over the points with
/// values > floor. rate is the negated slope, so decay gives rate > 0.
DecayFit fit_decay_rate(const std::vector<double>& times,
                        const std::vector<double>& values, double floor = 0.0);

enum class ReportFormat { kCsv, kJson };

/// `t,w2_empirical,w2_exact,ms_gap,bound_w2,bound_ms,violation_w2,violation_ms`
void write_report_csv(const BoundReport& report, std::ostream& out);
nlohmann::json to_json(const BoundReport& report);
BoundReport bound_report_from_json(const nlohmann::json& j);

void emit_report(const BoundReport& report, ReportFormat format,
                 const std::filesystem::path& destination);

/// Exact W2 and its bound on the config's grid (OU configs with Gaussian or
/// point initial laws only). CSV `t,w2_exact,bound_w2`.
struct ExactCurve {
  std::vector<double> t;
  std::vector<double> w2_exact;
  std::vector<double> bound_w2;
};
ExactCurve ou_exact_curve(const ExperimentConfig& cfg);
void write_exact_curve_csv(const ExactCurve& curve, std::ostream& out);

}  // namespace sconlab
