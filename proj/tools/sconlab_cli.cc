// sconlab: command-line front end for the contraction/W2 experiment harness.
//
// Exit codes: 0 success, 1 configuration or runtime error, 2 the run completed
// but found a violation (a non-contracting certificate or a bound violation).

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sconlab/errors.h"
#include "sconlab/harness.h"
#include "sconlab/wasserstein.h"

namespace sconlab {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitViolation = 2;

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  std::string out;  // empty: stdout
  unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--seed", common.seed, "Master seed (overrides the config)");
  cmd->add_option("--out", common.out, "Output path (stdout when omitted)");
  cmd->add_option("--threads", common.threads, "Worker threads; 0 = all cores")
      ->capture_default_str();
}

// Runs `write` against the --out file or stdout.
template <class Fn>
void write_output(const std::string& out, Fn&& write) {
  if (out.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream file(out);
  if (!file) throw IoError("cannot open " + out + " for writing");
  write(file);
  if (!file) throw IoError("write failed: " + out);
}

ExperimentConfig load_with_overrides(const std::string& path, const CommonOptions& common) {
  ExperimentConfig cfg = load_config(path);
  if (common.seed) {
    cfg.master_seed = *common.seed;
    if (auto* sampled = std::get_if<SampledCertificate>(&cfg.certificate)) {
      sampled->box.seed = *common.seed;
    }
  }
  cfg.threads = common.threads;
  return cfg;
}

int run_certify(const std::string& config_path, const CommonOptions& common) {
  const ExperimentConfig cfg = load_with_overrides(config_path, common);
  const ContractionCertificate cert = resolve_certificate(cfg);
  nlohmann::json j = to_json(cert);
  j["source"] =
      std::holds_alternative<AnalyticCertificate>(cfg.certificate) ? "analytic" : "sampled";
  write_output(common.out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  if (!cert.contracting) {
    std::cerr << "not contracting over the sampled region (beta_hat = " << cert.beta << ")\n";
    return kExitViolation;
  }
  return kExitOk;
}

int run_simulate(const std::string& config_path, const std::string& law,
                 const std::string& format, const CommonOptions& common) {
  const ExperimentConfig cfg = load_with_overrides(config_path, common);
  // The default horizon depends on the certified rate.
  const double beta = cfg.grid.t_max ? 1.0 : resolve_certificate(cfg).beta;
  if (!cfg.grid.t_max && !(beta > 0.0)) {
    throw Error("grid.t_max is unset and the system is not certified contracting");
  }
  const TimeGrid grid = resolve_grid(cfg, beta);
  SimulationOptions options;
  options.threads = cfg.threads;
  if (cfg.coupled_init) options.init_tag = "coupled";
  const InitialSampler& sampler = law == "mu" ? cfg.mu0 : cfg.nu0;
  const Ensemble ens =
      simulate_ensemble(build_system(cfg), sampler, cfg.n_traj, grid, cfg.master_seed, law,
                        options);
  if (format == "binary") {
    if (common.out.empty()) throw InvalidArgument("--format binary needs --out");
    write_ensemble_binary(ens, common.out);
  } else {
    write_output(common.out, [&](std::ostream& os) { write_ensemble_csv(ens, os); });
  }
  return kExitOk;
}

struct W2Options {
  std::string x, y, method = "assignment";
  std::optional<double> epsilon;
  std::optional<double> time;
  double tol = 1e-9;
  long max_iter = 100000;
};

int run_w2(const W2Options& o, const CommonOptions& common) {
  const PointCloud x = read_point_cloud_csv(o.x, o.time);
  const PointCloud y = read_point_cloud_csv(o.y, o.time);
  nlohmann::json j = {{"method", o.method}, {"n", x.size()}, {"dim", x.dim()}};
  if (o.method == "sinkhorn") {
    if (!o.epsilon) throw InvalidArgument("--method sinkhorn needs --epsilon");
    const SinkhornResult r = w2_sinkhorn(x, y, {*o.epsilon, o.tol, o.max_iter});
    j["distance_upper"] = r.distance_upper;
    j["epsilon"] = *o.epsilon;
    j["iterations"] = r.iterations;
    j["marginal_violation"] = r.marginal_violation;
  } else {
    j["distance"] = w2_assignment(x, y).distance;
  }
  write_output(common.out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return kExitOk;
}

int run_ou_exact(const std::string& config_path, const CommonOptions& common) {
  const ExperimentConfig cfg = load_with_overrides(config_path, common);
  const ExactCurve curve = ou_exact_curve(cfg);
  write_output(common.out, [&](std::ostream& os) { write_exact_curve_csv(curve, os); });
  for (std::size_t i = 0; i < curve.t.size(); ++i) {
    if (curve.w2_exact[i] > curve.bound_w2[i]) return kExitViolation;
  }
  return kExitOk;
}

int run_verify_bound(const std::string& config_path, const std::string& format,
                     const CommonOptions& common) {
  const ExperimentConfig cfg = load_with_overrides(config_path, common);
  const ContractionCertificate cert = resolve_certificate(cfg);
  if (!cert.contracting) {
    std::cerr << "certificate is not contracting (beta_hat = " << cert.beta
              << "); the bound does not apply\n";
    return kExitViolation;
  }
  const BoundReport report = run_experiment(cfg);
  const ReportFormat fmt = format == "json" ? ReportFormat::kJson : ReportFormat::kCsv;
  if (common.out.empty()) {
    if (fmt == ReportFormat::kCsv) {
      write_report_csv(report, std::cout);
    } else {
      std::cout << to_json(report).dump(2) << '\n';
    }
  } else {
    emit_report(report, fmt, common.out);
  }
  if (report.any_violation()) {
    std::cerr << "bound violated at one or more snapshots\n";
    return kExitViolation;
  }
  return kExitOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Stochastic contraction and Wasserstein-2 bound verification"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string config_path, law = "mu", sim_format = "csv", report_format = "csv";
  W2Options w2;

  CLI::App* certify = app.add_subcommand("certify", "Contraction certificate as JSON");
  certify->add_option("--config", config_path, "Experiment config (JSON)")->required();
  add_common(certify, common);

  CLI::App* simulate = app.add_subcommand("simulate", "Simulate one ensemble");
  simulate->add_option("--config", config_path, "Experiment config (JSON)")->required();
  simulate->add_option("--law", law, "Initial law to simulate")
      ->check(CLI::IsMember({"mu", "nu"}))
      ->capture_default_str();
  simulate->add_option("--format", sim_format, "csv or binary")
      ->check(CLI::IsMember({"csv", "binary"}))
      ->capture_default_str();
  add_common(simulate, common);

  CLI::App* w2_cmd = app.add_subcommand("w2", "W2 distance between two CSV point clouds");
  w2_cmd->add_option("--x", w2.x, "First cloud (CSV)")->required()->check(CLI::ExistingFile);
  w2_cmd->add_option("--y", w2.y, "Second cloud (CSV)")->required()->check(CLI::ExistingFile);
  w2_cmd->add_option("--method", w2.method, "assignment or sinkhorn")
      ->check(CLI::IsMember({"assignment", "sinkhorn"}))
      ->capture_default_str();
  w2_cmd->add_option("--epsilon", w2.epsilon, "Entropic regularization (sinkhorn)");
  w2_cmd->add_option("--tol", w2.tol, "Marginal tolerance (sinkhorn)")->capture_default_str();
  w2_cmd->add_option("--max-iter", w2.max_iter, "Iteration cap (sinkhorn)")
      ->capture_default_str();
  w2_cmd->add_option("--time", w2.time, "Snapshot time for ensemble CSVs (default: last)");
  add_common(w2_cmd, common);

  CLI::App* ou_exact = app.add_subcommand("ou-exact", "Exact OU W2 curve and bound as CSV");
  ou_exact->add_option("--config", config_path, "Experiment config (JSON)")->required();
  add_common(ou_exact, common);

  CLI::App* verify = app.add_subcommand("verify-bound", "Run an experiment and check the bounds");
  verify->add_option("--config", config_path, "Experiment config (JSON)")->required();
  verify->add_option("--format", report_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  add_common(verify, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*certify) return run_certify(config_path, common);
    if (*simulate) return run_simulate(config_path, law, sim_format, common);
    if (*w2_cmd) return run_w2(w2, common);
    if (*ou_exact) return run_ou_exact(config_path, common);
    if (*verify) return run_verify_bound(config_path, report_format, common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace
}  // namespace sconlab

int main(int argc, char** argv) { return sconlab::run(argc, argv); }
