#include "sconlab/harness.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>

#include "sconlab/errors.h"
#include "sconlab/parallel.h"
#include "sconlab/wasserstein.h"
#include "text_util.h"

namespace sconlab {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Vector vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw InvalidArgument(std::string(what) + ": expected an array");
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Matrix matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) {
    throw InvalidArgument(std::string(what) + ": expected a non-empty array of rows");
  }
  const auto rows = j.get<std::vector<std::vector<double>>>();
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) {
      throw InvalidArgument(std::string(what) + ": ragged matrix rows");
    }
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
  }
  return m;
}

json to_json_value(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json_value(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index k = 0; k < m.cols(); ++k) row[static_cast<std::size_t>(k)] = m(i, k);
    rows.push_back(row);
  }
  return rows;
}

InitialSampler sampler_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "gaussian") {
    return InitialSampler::gaussian(
        vector_from_json(j.at("mean"), "gaussian mean"),
        SymmetricMatrix(matrix_from_json(j.at("cov"), "gaussian cov")));
  }
  if (kind == "point") return InitialSampler::point(vector_from_json(j.at("x0"), "x0"));
  if (kind == "uniform_box") {
    return InitialSampler::uniform_box(vector_from_json(j.at("lower"), "lower"),
                                       vector_from_json(j.at("upper"), "upper"));
  }
  throw InvalidArgument("unknown initial law kind '" + kind + "'");
}

json to_json_value(const InitialSampler& sampler) {
  return std::visit(
      Overloaded{
          [](const InitialSampler::Gaussian& g) -> json {
            return {{"kind", "gaussian"},
                    {"mean", to_json_value(g.mean)},
                    {"cov", to_json_value(g.cov.matrix())}};
          },
          [](const InitialSampler::Point& p) -> json {
            return {{"kind", "point"}, {"x0", to_json_value(p.x0)}};
          },
          [](const InitialSampler::UniformBox& b) -> json {
            return {{"kind", "uniform_box"},
                    {"lower", to_json_value(b.lower)},
                    {"upper", to_json_value(b.upper)}};
          }},
      sampler.kind());
}

int system_dim(const SystemSpec& spec) {
  return std::visit(Overloaded{[](const OuFamily& f) { return static_cast<int>(f.a.rows()); },
                               [](const ScalarLinearFamily& f) { return f.dim; },
                               [](const GradientQuarticFamily& f) { return f.dim; }},
                    spec);
}

double spectral_norm(const Matrix& a) {
  return std::sqrt(std::max(0.0, lambda_max(SymmetricMatrix(a.transpose() * a))));
}

}  // namespace

void ExperimentConfig::validate() const {
  const int d = system_dim(system);
  if (d < 1) throw InvalidArgument("config: system dimension must be positive");
  if (const auto* ou = std::get_if<OuFamily>(&system)) {
    OuSystem check(ou->a, ou->mu, ou->sigma);  // throws on invalid parameters
  }
  if (mu0.dim() != d || nu0.dim() != d) {
    throw InvalidArgument("config: initial laws must match the system dimension");
  }
  if (metric.theta) {
    require_square(*metric.theta, "config metric theta");
    if (metric.theta->rows() != d) {
      throw InvalidArgument("config: metric dimension does not match the system");
    }
  }
  if (n_traj < kMinStatisticalTrajectories) {
    throw InvalidArgument("config: n_traj must be >= " +
                          std::to_string(kMinStatisticalTrajectories));
  }
  if (!(grid.dt > 0.0)) throw InvalidArgument("config: grid.dt must be positive");
  if (grid.t_max && !(*grid.t_max > 0.0)) {
    throw InvalidArgument("config: grid.t_max must be positive");
  }
  if (const auto* s = std::get_if<SinkhornMethod>(&w2)) {
    if (!(s->epsilon > 0.0)) throw InvalidArgument("config: sinkhorn epsilon must be > 0");
  }
  if (std::holds_alternative<AnalyticCertificate>(certificate)) {
    if (!std::holds_alternative<OuFamily>(system)) {
      throw InvalidArgument("config: analytic certificates exist only for the 'ou' family");
    }
    if (metric.theta) {
      throw InvalidArgument("config: the analytic OU certificate uses the identity metric");
    }
  } else {
    const auto& box = std::get<SampledCertificate>(certificate).box;
    box.validate();
    if (box.dim() != d) throw InvalidArgument("config: certificate box dimension mismatch");
  }
}

ExperimentConfig config_from_json(const json& j) {
  try {
    ExperimentConfig cfg;
    const json& sys = j.at("system");
    const auto family = sys.at("family").get<std::string>();
    if (family == "ou") {
      OuFamily f;
      f.a = matrix_from_json(sys.at("A"), "system.A");
      f.mu = sys.contains("mu") ? vector_from_json(sys.at("mu"), "system.mu")
                                : Vector::Zero(f.a.rows());
      f.sigma = sys.at("sigma").get<double>();
      cfg.system = f;
    } else if (family == "scalar_linear") {
      cfg.system = ScalarLinearFamily{sys.at("a").get<double>(), sys.at("sigma").get<double>(),
                                      sys.value("dim", 1)};
    } else if (family == "gradient_quartic") {
      cfg.system = GradientQuarticFamily{sys.value("dim", 1), sys.at("sigma").get<double>()};
    } else {
      throw InvalidArgument("unknown system family '" + family + "'");
    }

    if (j.contains("metric")) {
      const json& m = j.at("metric");
      const auto kind = m.value("kind", std::string("identity"));
      if (kind == "constant") {
        cfg.metric.theta = matrix_from_json(m.at("theta"), "metric.theta");
      } else if (kind != "identity") {
        throw InvalidArgument("unknown metric kind '" + kind + "'");
      }
    }

    cfg.mu0 = sampler_from_json(j.at("initial").at("mu"));
    cfg.nu0 = sampler_from_json(j.at("initial").at("nu"));
    cfg.coupled_init = j.value("coupled_init", false);

    if (j.contains("grid")) {
      const json& g = j.at("grid");
      cfg.grid.dt = g.value("dt", 1e-3);
      if (g.contains("t_max")) cfg.grid.t_max = g.at("t_max").get<double>();
      if (g.contains("snapshots")) {
        cfg.grid.snapshot_times = g.at("snapshots").get<std::vector<double>>();
      }
    }
    cfg.n_traj = j.value("n_traj", 1000);
    cfg.master_seed = j.value("master_seed", std::uint64_t{0});
    cfg.threads = j.value("threads", 1u);

    if (j.contains("w2")) {
      const json& w = j.at("w2");
      const auto method = w.value("method", std::string("assignment"));
      if (method == "sinkhorn") {
        SinkhornMethod s;
        s.epsilon = w.at("epsilon").get<double>();
        s.tol = w.value("tol", 1e-9);
        s.max_iter = w.value("max_iter", 100000L);
        cfg.w2 = s;
      } else if (method != "assignment") {
        throw InvalidArgument("unknown w2 method '" + method + "'");
      }
    }

    if (j.contains("certificate")) {
      const json& c = j.at("certificate");
      const auto source = c.value("source", std::string("analytic"));
      if (source == "sampled") {
        cfg.certificate = SampledCertificate{sampling_box_from_json(c.at("box"))};
      } else if (source != "analytic") {
        throw InvalidArgument("unknown certificate source '" + source + "'");
      }
    } else if (!std::holds_alternative<OuFamily>(cfg.system)) {
      throw InvalidArgument("config: non-OU systems need a sampled certificate box");
    }
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["system"] = std::visit(
      Overloaded{[](const OuFamily& f) -> json {
                   return {{"family", "ou"},
                           {"A", to_json_value(f.a)},
                           {"mu", to_json_value(f.mu)},
                           {"sigma", f.sigma}};
                 },
                 [](const ScalarLinearFamily& f) -> json {
                   return {{"family", "scalar_linear"}, {"a", f.a}, {"sigma", f.sigma},
                           {"dim", f.dim}};
                 },
                 [](const GradientQuarticFamily& f) -> json {
                   return {{"family", "gradient_quartic"}, {"dim", f.dim}, {"sigma", f.sigma}};
                 }},
      cfg.system);
  if (cfg.metric.theta) {
    j["metric"] = {{"kind", "constant"}, {"theta", to_json_value(*cfg.metric.theta)}};
  } else {
    j["metric"] = {{"kind", "identity"}};
  }
  j["initial"] = {{"mu", to_json_value(cfg.mu0)}, {"nu", to_json_value(cfg.nu0)}};
  j["coupled_init"] = cfg.coupled_init;
  json grid = {{"dt", cfg.grid.dt}};
  if (cfg.grid.t_max) grid["t_max"] = *cfg.grid.t_max;
  if (cfg.grid.snapshot_times) grid["snapshots"] = *cfg.grid.snapshot_times;
  j["grid"] = grid;
  j["n_traj"] = cfg.n_traj;
  j["master_seed"] = cfg.master_seed;
  j["w2"] = std::visit(Overloaded{[](const AssignmentMethod&) -> json {
                                    return {{"method", "assignment"}};
                                  },
                                  [](const SinkhornMethod& s) -> json {
                                    return {{"method", "sinkhorn"},
                                            {"epsilon", s.epsilon},
                                            {"tol", s.tol},
                                            {"max_iter", s.max_iter}};
                                  }},
                       cfg.w2);
  j["certificate"] = std::visit(
      Overloaded{[](const AnalyticCertificate&) -> json { return {{"source", "analytic"}}; },
                 [](const SampledCertificate& s) -> json {
                   return {{"source", "sampled"}, {"box", to_json(s.box)}};
                 }},
      cfg.certificate);
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidArgument("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

SdeSystem build_system(const ExperimentConfig& cfg) {
  return std::visit(
      Overloaded{[](const OuFamily& f) { return OuSystem(f.a, f.mu, f.sigma).to_sde(); },
                 [](const ScalarLinearFamily& f) {
                   return make_scalar_linear_system(f.a, f.sigma, f.dim);
                 },
                 [](const GradientQuarticFamily& f) {
                   return make_gradient_quartic_system(f.dim, f.sigma);
                 }},
      cfg.system);
}

MetricField build_metric(const ExperimentConfig& cfg) {
  if (cfg.metric.theta) return MetricField::constant(*cfg.metric.theta);
  return MetricField::identity(system_dim(cfg.system));
}

std::optional<OuSystem> build_ou(const ExperimentConfig& cfg) {
  if (const auto* f = std::get_if<OuFamily>(&cfg.system)) {
    return OuSystem(f->a, f->mu, f->sigma);
  }
  return std::nullopt;
}

ContractionCertificate resolve_certificate(const ExperimentConfig& cfg) {
  if (const auto* sampled = std::get_if<SampledCertificate>(&cfg.certificate)) {
    return certify(build_system(cfg), build_metric(cfg), sampled->box);
  }
  const auto ou = build_ou(cfg);
  if (!ou) throw InvalidArgument("analytic certificate requires an OU system");
  const OuConstants c = ou_constants(*ou);
  const double a_norm = spectral_norm(ou->a());
  const double d = ou->dim();
  ContractionCertificate cert;
  cert.beta = c.beta;
  cert.alpha = c.alpha;
  cert.c_sigma = c.c_sigma;
  cert.c_ellip = ou->sigma() * ou->sigma();
  // ||A(mu - x)|| + sigma sqrt(d) <= (||A|| ||mu|| + sigma sqrt(d)) + ||A|| ||x||
  cert.k1 = std::max(a_norm * ou->mu_target().norm() + ou->sigma() * std::sqrt(d), a_norm);
  cert.k2 = a_norm;
  cert.contracting = c.beta > kContractionTieTolerance;
  cert.box.t_max = cfg.grid.t_max.value_or(6.0 / c.beta);
  cert.box.n_samples = 0;
  cert.box.seed = cfg.master_seed;
  return cert;
}

TimeGrid resolve_grid(const ExperimentConfig& cfg, double beta) {
  const double t_max = cfg.grid.t_max.value_or(6.0 / beta);
  if (!cfg.grid.snapshot_times) return TimeGrid::geometric(t_max, cfg.grid.dt);
  TimeGrid grid;
  grid.t_max = t_max;
  grid.dt = cfg.grid.dt;
  grid.snapshot_times = *cfg.grid.snapshot_times;
  if (grid.snapshot_times.empty() || grid.snapshot_times.front() != 0.0) {
    grid.snapshot_times.insert(grid.snapshot_times.begin(), 0.0);
  }
  grid.validate();
  return grid;
}

double theoretical_bound_w2(double t, double w2_0, double alpha, double beta,
                            double c_sigma) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw InvalidArgument("theoretical_bound_w2: alpha and beta must be > 0");
  }
  if (c_sigma < 0.0 || t < 0.0) {
    throw InvalidArgument("theoretical_bound_w2: need c_sigma >= 0 and t >= 0");
  }
  return (std::exp(-beta * t) * w2_0 + std::sqrt(c_sigma / beta)) / std::sqrt(alpha);
}

double theoretical_bound_ms(double t, double ms_0, double alpha, double beta,
                            double c_sigma) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw InvalidArgument("theoretical_bound_ms: alpha and beta must be > 0");
  }
  if (c_sigma < 0.0 || t < 0.0) {
    throw InvalidArgument("theoretical_bound_ms: need c_sigma >= 0 and t >= 0");
  }
  return (std::exp(-2.0 * beta * t) * ms_0 + c_sigma / beta) / alpha;
}

bool BoundReport::any_violation() const {
  return std::any_of(rows.begin(), rows.end(),
                     [](const BoundRow& r) { return r.violation_w2 || r.violation_ms; });
}

namespace {

double empirical_w2(const W2Method& method, const Matrix& x, const Matrix& y) {
  const PointCloud cx(x);
  const PointCloud cy(y);
  if (const auto* s = std::get_if<SinkhornMethod>(&method)) {
    return w2_sinkhorn(cx, cy, {s->epsilon, s->tol, s->max_iter}).distance_upper;
  }
  return w2_assignment(cx, cy).distance;
}

double standard_error(const std::vector<double>& values) {
  const double k = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / k;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
}

}  // namespace

BoundReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const SdeSystem system = build_system(cfg);
  BoundReport report;
  report.config = to_json(cfg);
  report.certificate = resolve_certificate(cfg);
  report.certificate_source =
      std::holds_alternative<AnalyticCertificate>(cfg.certificate) ? "analytic" : "sampled";
  const ContractionCertificate& cert = report.certificate;
  if (!cert.contracting) {
    throw Error("certificate is not contracting (beta_hat = " + std::to_string(cert.beta) +
                "); the W2 bound does not apply");
  }
  const TimeGrid grid = resolve_grid(cfg, cert.beta);

  SimulationOptions sim_options;
  sim_options.threads = cfg.threads;
  if (cfg.coupled_init) sim_options.init_tag = "coupled";
  const Ensemble ens_mu =
      simulate_ensemble(system, cfg.mu0, cfg.n_traj, grid, cfg.master_seed, "mu", sim_options);
  const Ensemble ens_nu =
      simulate_ensemble(system, cfg.nu0, cfg.n_traj, grid, cfg.master_seed, "nu", sim_options);
  const std::vector<double> ms = mean_square_gap(ens_mu, ens_nu);

  const auto ou = build_ou(cfg);
  const auto law_mu = cfg.mu0.as_gaussian();
  const auto law_nu = cfg.nu0.as_gaussian();
  const bool exact_available = ou && law_mu && law_nu;

  const std::size_t n_snap = grid.snapshot_times.size();
  const int group_size = cfg.n_traj / kBootstrapGroups;
  report.rows.resize(n_snap);
  parallel_for(n_snap, cfg.threads, [&](std::size_t s) {
    BoundRow& row = report.rows[s];
    row.t = grid.snapshot_times[s];
    const Matrix& x = ens_mu.snapshots[s];
    const Matrix& y = ens_nu.snapshots[s];
    row.w2_empirical = empirical_w2(cfg.w2, x, y);
    row.ms_gap = ms[s];
    if (exact_available) row.w2_exact = ou_exact_w2(*ou, row.t, *law_mu, *law_nu);

    std::vector<double> w2_groups, ms_groups;
    for (int g = 0; g < kBootstrapGroups; ++g) {
      const Matrix xs = x.middleRows(g * group_size, group_size);
      const Matrix ys = y.middleRows(g * group_size, group_size);
      w2_groups.push_back(empirical_w2(cfg.w2, xs, ys));
      ms_groups.push_back((xs - ys).rowwise().squaredNorm().sum() / group_size);
    }
    row.w2_margin = kViolationSigmas * standard_error(w2_groups);
    row.ms_margin = kViolationSigmas * standard_error(ms_groups);
  });

  // Row 0 is t = 0 by construction of the grid.
  report.w2_0 = report.rows.front().w2_exact.value_or(report.rows.front().w2_empirical);
  report.ms_0 = report.rows.front().ms_gap;
  for (BoundRow& row : report.rows) {
    row.bound_w2 = theoretical_bound_w2(row.t, report.w2_0, cert.alpha, cert.beta, cert.c_sigma);
    row.bound_ms = theoretical_bound_ms(row.t, report.ms_0, cert.alpha, cert.beta, cert.c_sigma);
    row.violation_w2 = row.w2_empirical > row.bound_w2 + row.w2_margin ||
                       (row.w2_exact && *row.w2_exact > row.bound_w2);
    row.violation_ms = row.ms_gap > row.bound_ms + row.ms_margin;
  }
  return report;
}

DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values,
                        double floor) {
  if (times.size() != values.size()) {
    throw InvalidArgument("fit_decay_rate: times and values differ in length");
  }
  if (floor < 0.0) throw InvalidArgument("fit_decay_rate: floor must be >= 0");
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (values[i] > floor && std::isfinite(values[i])) {
      ts.push_back(times[i]);
      ys.push_back(std::log(values[i] - floor));
    }
  }
  if (ts.size() < 3) {
    throw InvalidArgument("fit_decay_rate: fewer than 3 points above the floor");
  }
  const double n = static_cast<double>(ts.size());
  const double t_mean = std::accumulate(ts.begin(), ts.end(), 0.0) / n;
  const double y_mean = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - t_mean) * (ts[i] - t_mean);
    sty += (ts[i] - t_mean) * (ys[i] - y_mean);
    syy += (ys[i] - y_mean) * (ys[i] - y_mean);
  }
  if (!(stt > 0.0)) throw InvalidArgument("fit_decay_rate: times are all equal");
  const double slope = sty / stt;
  DecayFit fit;
  fit.rate = -slope;
  fit.intercept = y_mean - slope * t_mean;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = ys[i] - (fit.intercept + slope * ts[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

void write_report_csv(const BoundReport& report, std::ostream& out) {
  using internal::format_double;
  out << "t,w2_empirical,w2_exact,ms_gap,bound_w2,bound_ms,violation_w2,violation_ms\n";
  for (const BoundRow& r : report.rows) {
    out << format_double(r.t) << ',' << format_double(r.w2_empirical) << ','
        << (r.w2_exact ? format_double(*r.w2_exact) : "") << ',' << format_double(r.ms_gap)
        << ',' << format_double(r.bound_w2) << ',' << format_double(r.bound_ms) << ','
        << (r.violation_w2 ? 1 : 0) << ',' << (r.violation_ms ? 1 : 0) << '\n';
  }
}

json to_json(const BoundReport& report) {
  json rows = json::array();
  for (const BoundRow& r : report.rows) {
    rows.push_back({{"t", r.t},
                    {"w2_empirical", r.w2_empirical},
                    {"w2_exact", r.w2_exact ? json(*r.w2_exact) : json(nullptr)},
                    {"ms_gap", r.ms_gap},
                    {"bound_w2", r.bound_w2},
                    {"bound_ms", r.bound_ms},
                    {"violation_w2", r.violation_w2},
                    {"violation_ms", r.violation_ms},
                    {"w2_margin", r.w2_margin},
                    {"ms_margin", r.ms_margin}});
  }
  return {{"rows", rows},
          {"certificate", to_json(report.certificate)},
          {"certificate_source", report.certificate_source},
          {"w2_0", report.w2_0},
          {"ms_0", report.ms_0},
          {"config", report.config}};
}

BoundReport bound_report_from_json(const json& j) {
  BoundReport report;
  for (const json& r : j.at("rows")) {
    BoundRow row;
    row.t = r.at("t").get<double>();
    row.w2_empirical = r.at("w2_empirical").get<double>();
    if (!r.at("w2_exact").is_null()) row.w2_exact = r.at("w2_exact").get<double>();
    row.ms_gap = r.at("ms_gap").get<double>();
    row.bound_w2 = r.at("bound_w2").get<double>();
    row.bound_ms = r.at("bound_ms").get<double>();
    row.violation_w2 = r.at("violation_w2").get<bool>();
    row.violation_ms = r.at("violation_ms").get<bool>();
    row.w2_margin = r.at("w2_margin").get<double>();
    row.ms_margin = r.at("ms_margin").get<double>();
    report.rows.push_back(row);
  }
  report.certificate = certificate_from_json(j.at("certificate"));
  report.certificate_source = j.at("certificate_source").get<std::string>();
  report.w2_0 = j.at("w2_0").get<double>();
  report.ms_0 = j.at("ms_0").get<double>();
  report.config = j.at("config");
  return report;
}

void emit_report(const BoundReport& report, ReportFormat format,
                 const std::filesystem::path& destination) {
  std::ofstream out(destination);
  if (!out) throw IoError("cannot open " + destination.string() + " for writing");
  if (format == ReportFormat::kCsv) {
    write_report_csv(report, out);
  } else {
    out << to_json(report).dump(2) << '\n';
  }
  if (!out) throw IoError("write failed: " + destination.string());
}

ExactCurve ou_exact_curve(const ExperimentConfig& cfg) {
  const auto ou = build_ou(cfg);
  const auto law_mu = cfg.mu0.as_gaussian();
  const auto law_nu = cfg.nu0.as_gaussian();
  if (!ou || !law_mu || !law_nu) {
    throw InvalidArgument(
        "exact W2 needs an 'ou' system with gaussian or point initial laws");
  }
  const OuConstants c = ou_constants(*ou);
  const TimeGrid grid = resolve_grid(cfg, c.beta);
  ExactCurve curve;
  const double w2_0 = ou_exact_w2(*ou, 0.0, *law_mu, *law_nu);
  for (double t : grid.snapshot_times) {
    curve.t.push_back(t);
    curve.w2_exact.push_back(ou_exact_w2(*ou, t, *law_mu, *law_nu));
    curve.bound_w2.push_back(theoretical_bound_w2(t, w2_0, c.alpha, c.beta, c.c_sigma));
  }
  return curve;
}

void write_exact_curve_csv(const ExactCurve& curve, std::ostream& out) {
  using internal::format_double;
  out << "t,w2_exact,bound_w2\n";
  for (std::size_t i = 0; i < curve.t.size(); ++i) {
    out << format_double(curve.t[i]) << ',' << format_double(curve.w2_exact[i]) << ','
        << format_double(curve.bound_w2[i]) << '\n';
  }
}

}  // namespace sconlab
