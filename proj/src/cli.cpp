#include "cbtail/cli.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "cbtail/checkerboard.hpp"
#include "cbtail/config.hpp"
#include "cbtail/data_io.hpp"
#include "cbtail/errors.hpp"
#include "cbtail/multiplier_bootstrap.hpp"
#include "cbtail/property_suites.hpp"
#include "cbtail/results_io.hpp"
#include "cbtail/sim_harness.hpp"
#include "cbtail/tail_estimation.hpp"
#include "cbtail/tuning.hpp"

namespace cbtail {

namespace {

struct TuneArgs {
  std::size_t n = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double rho = 1.0;
};

struct EstimateArgs {
  std::string input;
  std::optional<double> alpha;
  std::optional<double> beta;
  double rho = 1.0;
  std::optional<std::size_t> k;
  std::optional<int> m;
  std::string side = "lower";
  double level = 0.90;
  std::size_t B = 500;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string format = "text";
  bool no_clamp = false;
  std::string grid_out;
};

struct SimulateArgs {
  std::string config;
  std::string output;
  std::string format;
  std::optional<int> threads;
  bool no_timing = false;
  bool quiet = false;
};

int run_tune(const TuneArgs& a, std::ostream& out) {
  const TuningPlan p = plan(a.n, a.alpha, a.beta, a.rho);
  fmt::print(out, "n = {}\nalpha = {:g}, beta = {:g}, rho = {:g}\n", p.n, p.alpha, p.beta, p.rho);
  fmt::print(out, "exponents: 0 < alpha < {:.6g}, beta > {:.6g}: PASS\n",
             alpha_upper_bound(p.rho), beta_lower_bound(p.alpha));
  fmt::print(out, "k = {}\nm = {}\n", p.k, p.m);
  for (const auto& c : p.checks) {
    fmt::print(out, "check {:<15} {:<15} {:>12.6g} < {:<12.6g} {}\n", c.name, c.relation, c.lhs,
               c.rhs, c.pass ? "PASS" : "WARN");
  }
  fmt::print(out, "{}\n", p.all_pass() ? "all checks PASS" : "finite-n warnings present");
  return 0;
}

int run_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& err) {
  const BivariateSample data = read_sample_file(a.input);
  const std::size_t n = data.size();
  std::size_t k = 0;
  int m = 0;
  std::vector<std::string> warnings;
  if (a.k && a.m) {
    k = *a.k;
    m = *a.m;
  } else if (a.alpha && a.beta && !a.k && !a.m) {
    const TuningPlan p = plan(n, *a.alpha, *a.beta, a.rho);
    k = p.k;
    m = p.m;
    warnings = p.warnings();
  } else {
    throw DomainError("give either --alpha and --beta, or --k and --m");
  }
  for (const auto& w : warnings) fmt::print(err, "cbtail: warning: {}\n", w);

  const TailSide side = parse_side(a.side);
  const TailEstimator est(EmpiricalCopula(ranks(data)), k, m, side);
  const BootstrapPair boot = bootstrap_pair(est, MultiplierLaw::standard_exponential(), a.B,
                                            StreamSeed{a.seed, {}}, a.threads);
  const ConfidenceInterval ci =
      confidence_interval(boot.checkerboard, boot.lambda_checkerboard, k, a.level, !a.no_clamp);

  if (!a.grid_out.empty()) {
    std::ofstream g(a.grid_out);
    if (!g) throw IoError(fmt::format("cannot open '{}' for writing", a.grid_out));
    write_grid(g, build_empirical_grid(est.copula(), m));
  }

  if (a.format == "json") {
    nlohmann::json j = {{"n", n},
                        {"k", k},
                        {"m", m},
                        {"side", to_string(side)},
                        {"lambda_hat", boot.lambda_checkerboard},
                        {"lambda_hat_raw", boot.lambda_raw},
                        {"level", a.level},
                        {"B", a.B},
                        {"seed", a.seed},
                        {"ci", {ci.lo, ci.hi}},
                        {"ci_unclamped", {ci.raw_lo, ci.raw_hi}},
                        {"ci_clamped", ci.clamped},
                        {"bootstrap_sd", boot.checkerboard.sd()},
                        {"warnings", warnings}};
    out << j.dump(2) << '\n';
    return 0;
  }
  fmt::print(out, "n = {}\nk = {}\nm = {}\nside = {}\n", n, k, m, to_string(side));
  fmt::print(out, "lambda_hat = {:.6f}\nlambda_hat_raw = {:.6f}\n", boot.lambda_checkerboard,
             boot.lambda_raw);
  fmt::print(out, "ci{:g} = [{:.6f}, {:.6f}]\n", a.level * 100, ci.lo, ci.hi);
  if (ci.clamped) fmt::print(out, "ci_unclamped = [{:.6f}, {:.6f}]\n", ci.raw_lo, ci.raw_hi);
  fmt::print(out, "bootstrap B = {}, seed = {}, sd = {:.6f}\n", a.B, a.seed,
             boot.checkerboard.sd());
  return 0;
}

int run_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  ExperimentConfig config = load_config(a.config);
  if (!a.output.empty()) {
    config.output = a.output;
    if (a.format.empty()) {
      config.format = config.output.extension() == ".json" ? OutputFormat::Json
                                                           : OutputFormat::Csv;
    }
  }
  if (!a.format.empty()) config.format = parse_format(a.format);
  if (a.threads) config.parallelism = *a.threads;
  if (a.no_timing) config.record_timing = false;
  if (config.parallelism < 1) throw DomainError("--threads must be >= 1");

  HarnessOptions options;
  options.threads = config.parallelism;
  options.record_timing = config.record_timing;
  if (!a.quiet) options.progress = [&err](const std::string& s) { fmt::print(err, "{}\n", s); };
  const ResultSet results = run_experiment(config, options);
  write_results(config.output, results, config.format);
  fmt::print(out, "wrote {} records to {}\n", results.records.size(), config.output.string());
  return 0;
}

int run_selftest(std::uint64_t seed, std::ostream& out) {
  const auto suites = selftest_suites(seed);
  bool ok = true;
  for (const auto& s : suites) {
    fmt::print(out, "{:<28} {} checks={} violations={} worst_excess={:.3g} ({:.2f}s){}\n", s.name,
               s.pass() ? "PASS" : "FAIL", s.checks, s.violations, s.worst, s.seconds,
               s.note.empty() ? "" : "  " + s.note);
    ok = ok && s.pass();
  }
  fmt::print(out, "selftest {}\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Checkerboard-copula tail dependence estimation and multiplier bootstrap",
               "cbtail"};
  app.require_subcommand(1);

  TuneArgs tune;
  auto* tune_cmd = app.add_subcommand("tune", "Report k = n^alpha, m = n^beta and checks");
  tune_cmd->add_option("--n", tune.n, "Sample size")->required();
  tune_cmd->add_option("--alpha", tune.alpha, "Exponent of k")->required();
  tune_cmd->add_option("--beta", tune.beta, "Exponent of m")->required();
  tune_cmd->add_option("--rho", tune.rho, "Second-order exponent")->capture_default_str();

  EstimateArgs est;
  auto* est_cmd = app.add_subcommand("estimate", "Tail dependence coefficient and bootstrap CI");
  est_cmd->add_option("--input", est.input, "Two-column data file")->required();
  est_cmd->add_option("--alpha", est.alpha, "Exponent of k (with --beta)");
  est_cmd->add_option("--beta", est.beta, "Exponent of m (with --alpha)");
  est_cmd->add_option("--rho", est.rho, "Second-order exponent")->capture_default_str();
  est_cmd->add_option("--k", est.k, "Explicit k (with --m)");
  est_cmd->add_option("--m", est.m, "Explicit checkerboard resolution (with --k)");
  est_cmd->add_option("--side", est.side, "lower or upper")->capture_default_str();
  est_cmd->add_option("--level", est.level, "Confidence level")->capture_default_str();
  est_cmd->add_option("--B", est.B, "Bootstrap replicates")->capture_default_str();
  est_cmd->add_option("--seed", est.seed, "Multiplier seed")->capture_default_str();
  est_cmd->add_option("--threads", est.threads, "OpenMP threads")->capture_default_str();
  est_cmd->add_option("--format", est.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  est_cmd->add_flag("--no-clamp", est.no_clamp, "Report the CI without clamping to [0, 1]");
  est_cmd->add_option("--grid-out", est.grid_out, "Write the empirical checkerboard grid");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a Monte Carlo experiment from a config");
  sim_cmd->add_option("--config", sim.config, "Experiment config file")->required();
  sim_cmd->add_option("--output", sim.output, "Override the output path");
  sim_cmd->add_option("--format", sim.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sim_cmd->add_option("--threads", sim.threads, "Override parallelism");
  sim_cmd->add_flag("--no-timing", sim.no_timing, "Write 0 in the seconds column");
  sim_cmd->add_flag("--quiet", sim.quiet, "No progress lines on stderr");

  std::uint64_t self_seed = 20240917;
  auto* self_cmd = app.add_subcommand("selftest", "Run the property suites");
  self_cmd->add_option("--seed", self_seed, "Master seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*tune_cmd) return run_tune(tune, out);
    if (*est_cmd) return run_estimate(est, out, err);
    if (*sim_cmd) return run_simulate(sim, out, err);
    if (*self_cmd) return run_selftest(self_seed, out);
  } catch (const Error& e) {
    fmt::print(err, "cbtail: error[{}]: {}\n", e.kind(), e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(err, "cbtail: error[internal]: {}\n", e.what());
    return 2;
  }
  return 0;
}

}  // namespace cbtail
