// Acceptance run: one PASS/FAIL line per criterion, plus indented detail
// lines. Exit status is the number of failed criteria (capped at 125).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <omp.h>

#include "cbtail/checkerboard.hpp"
#include "cbtail/copula_models.hpp"
#include "cbtail/multiplier_bootstrap.hpp"
#include "cbtail/property_suites.hpp"
#include "cbtail/sim_harness.hpp"
#include "cbtail/tail_estimation.hpp"
#include "cbtail/tuning.hpp"

using namespace cbtail;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void verdict(int id, const std::string& name, bool pass, const std::string& summary) {
  fmt::print("[{}] {:>2} {}: {}\n", pass ? "PASS" : "FAIL", id, name, summary);
  std::fflush(stdout);
  if (!pass) ++failures;
}

void detail(const std::string& line) {
  fmt::print("        {}\n", line);
  std::fflush(stdout);
}

std::string suite_line(const SuiteResult& s) {
  return fmt::format("{}: checks={} violations={} worst_excess={:.3g} ({:.2f}s){}", s.name,
                     s.checks, s.violations, s.worst, s.seconds,
                     s.note.empty() ? "" : "  " + s.note);
}

// Clayton(1) cell of the CLT and bootstrap criteria.
ExperimentConfig clayton_cell(std::size_t B, std::uint64_t seed) {
  ExperimentConfig c;
  c.model = CopulaModel::clayton(1.0);
  c.ns = {2000};
  c.pairs = {{0.5, 0.8}};
  c.rho = 1.0;
  c.B = B;
  c.reps = 1000;
  c.level = 0.90;
  c.seed = seed;
  return c;
}

double normal_cdf(double x, double sd) { return 0.5 * std::erfc(-x / (sd * std::sqrt(2.0))); }

double ks_distance(std::vector<double> xs, double sd) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf(xs[i], sd);
    d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
  }
  return d;
}

double sample_sd(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

void criterion_operator(std::uint64_t seed) {
  const SuiteResult s = operator_suite(200, 10000, seed);
  verdict(1, "operator suite", s.pass() && s.seconds < 10.0,
          fmt::format("{} violations in {} checks, {:.2f}s (limit 10s)", s.violations, s.checks,
                      s.seconds));
  detail(suite_line(s));
}

void criterion_lipschitz(std::uint64_t seed) {
  const SuiteResult s = lipschitz_suite(100, 2000, 10000, seed);
  verdict(2, "empirical copula 2-Lipschitz", s.pass(),
          fmt::format("{} violations in {} pairs, worst excess {:.3g}", s.violations, s.checks,
                      s.worst));
  detail(suite_line(s));
  const SuiteResult e = lipschitz_exact_suite(100, 2000, 10000, seed);
  detail("same design against |du| + |dv| + 2/n: " + suite_line(e));
}

void criterion_deviation(std::uint64_t seed) {
  const SuiteResult d = deviation_suite(6, {8, 32, 128}, 512, seed);
  const SuiteResult t = tail_deviation_suite(6, {8, 32, 128}, 64, seed + 1);
  verdict(3, "checkerboard deviation 4/m and 4n/(km)", d.pass() && t.pass(),
          fmt::format("{} + {} violations in {} + {} probes", d.violations, t.violations,
                      d.checks, t.checks));
  detail(suite_line(d));
  detail(suite_line(t));
}

double interior_error(const CopulaModel& model, int m, int probe) {
  const auto cdf = [&](double u, double v) { return copula_cdf(model, u, v); };
  const CheckerboardGrid grid = build_grid(cdf, m);
  double worst = 0.0;
  for (int a = 0; a < probe; ++a) {
    for (int b = 0; b < probe; ++b) {
      const double u = 0.1 + 0.8 * a / (probe - 1), v = 0.1 + 0.8 * b / (probe - 1);
      worst = std::max(worst, std::abs(grid(u, v) - cdf(u, v)));
    }
  }
  return worst;
}

void criterion_bias_order() {
  const auto t0 = Clock::now();
  constexpr int probe = 801;
  // Rounding slack for a bilinear interpolant of values in [0, 1].
  constexpr double slack = 8 * 2.220446049250313e-16;
  bool pass = true;
  std::vector<std::string> lines;
  for (const auto& model : {CopulaModel::independence(), CopulaModel::clayton(1.0)}) {
    const double e16 = interior_error(model, 16, probe);
    const double e32 = interior_error(model, 32, probe);
    const double K = e16 * 16 * 16;
    const double limit = 1.1 * K / (32.0 * 32.0) + slack;
    pass = pass && e32 <= limit;
    lines.push_back(fmt::format("{}: max err m=16 {:.4g} (K={:.4g}), m=32 {:.4g} <= {:.4g}",
                                model.describe(), e16, K, e32, limit));
  }
  const double secs = since(t0);
  verdict(4, "bias order O(1/m^2)", pass && secs < 30.0,
          fmt::format("{:.2f}s (limit 30s)", secs));
  for (const auto& l : lines) detail(l);
}

void criterion_consistency(std::uint64_t seed) {
  // One long Clayton(1) sample; the smaller n are its prefixes.
  Engine rng = make_stream(seed, {5});
  const BivariateSample full = sample(CopulaModel::clayton(1.0), 100000, rng);
  std::vector<double> errs;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    BivariateSample s{{full.xs.begin(), full.xs.begin() + n}, {full.ys.begin(), full.ys.begin() + n}};
    const TuningPlan p = plan(n, 0.5, 0.8, 1.0);
    const TailEstimator est(EmpiricalCopula(ranks(s)), p.k, p.m, TailSide::Lower);
    const double lambda = est.lambda_hat();
    errs.push_back(std::abs(lambda - 0.5));
    detail(fmt::format("n={} k={} m={} lambda_hat={:.5f} |err|={:.5f}", n, p.k, p.m, lambda,
                       errs.back()));
  }
  const bool decreasing = errs[0] > errs[1] && errs[1] > errs[2];
  verdict(5, "consistency", decreasing && errs[2] <= 0.03,
          fmt::format("|err| {:.4f} -> {:.4f} -> {:.4f}, decreasing={}, final <= 0.03: {}",
                      errs[0], errs[1], errs[2], decreasing, errs[2] <= 0.03));
}

void criterion_clt(std::uint64_t seed, int threads) {
  const auto t0 = Clock::now();
  const ExperimentConfig c = clayton_cell(2, seed);
  const Cell cell = experiment_cells(c).front();
  const CellRun run = run_cell(c, cell, threads, 0);
  const double root_k = std::sqrt(static_cast<double>(cell.plan.k));
  std::vector<double> z;
  for (const auto& o : run.reps) z.push_back(root_k * (o.lambda_checkerboard - 0.5));
  const double sd = sample_sd(z);
  const double ks = ks_distance(z, std::sqrt(0.1875));
  const double secs = since(t0);
  verdict(6, "CLT shape", sd >= 0.35 && sd <= 0.52 && ks <= 0.08,
          fmt::format("sd={:.4f} in [0.35, 0.52], KS={:.4f} <= 0.08 ({} reps, k={}, m={}, "
                      "{:.1f}s at {} threads)",
                      sd, ks, z.size(), cell.plan.k, cell.plan.m, secs, threads));
}

void criterion_bootstrap(std::uint64_t seed, int threads) {
  const auto t0 = Clock::now();
  const ExperimentConfig c = clayton_cell(500, seed);
  const Cell cell = experiment_cells(c).front();
  const CellRun run = run_cell(c, cell, threads, c.B);
  const auto rows = summarize(c, run, false);
  const ResultRecord& cb = rows[1];
  double sd_sum = 0.0;
  for (const auto& o : run.reps) sd_sum += o.boot_sd_checkerboard;
  const double mean_sd = sd_sum / static_cast<double>(run.reps.size());
  const double sigma = std::sqrt(0.1875);
  const bool cover_ok = cb.coverage >= 0.85 && cb.coverage <= 0.95;
  const bool sd_ok = std::abs(mean_sd - sigma) <= 0.25 * sigma;
  verdict(7, "bootstrap validity", cover_ok && sd_ok,
          fmt::format("coverage={:.3f} in [0.85, 0.95], mean bootstrap sd={:.4f} within 25% of "
                      "{:.4f} ({:.1f}s at {} threads)",
                      cb.coverage, mean_sd, sigma, since(t0), threads));
  detail(fmt::format("checkerboard: bias={:.4g} mse={:.4g} mean CI length={:.4f}", cb.bias,
                     cb.mse, cb.ci_length));
  detail(fmt::format("raw (classical multiplier bootstrap): bias={:.4g} coverage={:.3f} "
                     "mean CI length={:.4f}",
                     rows[0].bias, rows[0].coverage, rows[0].ci_length));
}

void criterion_anchors(std::uint64_t seed, int threads) {
  // Comonotone at k/n = 0.1 on the grids of several m, and raw at any k.
  Engine rng = make_stream(seed, {8, 0});
  const EmpiricalCopula como(ranks(sample(CopulaModel::comonotone(), 1000, rng)));
  bool exact = true;
  for (int m : {10, 20, 50, 1000}) {
    exact = exact && TailEstimator(como, 100, m, TailSide::Lower).lambda_hat() == 1.0;
    exact = exact && TailEstimator(como, 100, m, TailSide::Upper).lambda_hat() == 1.0;
  }
  for (std::size_t k : {7u, 31u, 100u, 999u}) {
    exact = exact &&
            TailEstimator(como, k, 10, TailSide::Lower, Smoothing::Raw).lambda_hat() == 1.0;
  }

  const std::size_t n = 100000, reps = 50;
  const TuningPlan p = plan(n, 0.5, 0.8, 1.0);
  std::vector<double> lambdas(reps);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::size_t r = 0; r < reps; ++r) {
    Engine g = make_stream(seed, {8, 1, r});
    const EmpiricalCopula c(ranks(sample(CopulaModel::independence(), n, g)));
    lambdas[r] = TailEstimator(c, p.k, p.m, TailSide::Lower).lambda_hat();
  }
  double mean = 0.0;
  for (double l : lambdas) mean += l;
  mean /= static_cast<double>(reps);
  verdict(8, "degenerate anchors", exact && mean <= 0.05,
          fmt::format("comonotone exact 1: {}; independence mean lambda_hat={:.4f} <= 0.05 "
                      "({} reps, n={}, k={}, m={})",
                      exact, mean, reps, n, p.k, p.m));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void criterion_determinism(std::uint64_t seed) {
  const fs::path dir = fs::temp_directory_path() / fmt::format("cbtail-accept-{}", seed);
  fs::create_directories(dir);
  const fs::path config = dir / "det.ini";
  std::ofstream(config) << fmt::format(
      "schema = 1\n[experiment]\nmodel = clayton\ntheta = 1\nn = 500, 1000\n"
      "pairs = 0.5:0.8, 0.6:0.75\nrho = 1\nB = 100\nreps = 60\nseed = {}\n",
      seed);
  std::vector<std::string> outputs;
  bool ran = true;
  for (int threads : {1, 8}) {
    const fs::path out = dir / fmt::format("t{}.csv", threads);
    const std::string cmd =
        fmt::format("{} simulate --quiet --no-timing --config {} --threads {} --output {}",
                    CBTAIL_CLI_PATH, config.string(), threads, out.string());
    ran = ran && std::system(cmd.c_str()) == 0;
    outputs.push_back(slurp(out));
  }
  const bool same = ran && !outputs[0].empty() && outputs[0] == outputs[1];
  verdict(9, "determinism across parallelism", same,
          fmt::format("simulate exit ok: {}; CSV bytes {} vs {}, identical: {}", ran,
                      outputs[0].size(), outputs[1].size(), outputs[0] == outputs[1]));
  fs::remove_all(dir);
}

void criterion_weighted(std::uint64_t seed) {
  const SuiteResult stated = weighted_modulus_suite(ModulusForm::AsStated, 100, 10000, 10000, seed);
  const SuiteResult delta = delta_n_suite(100, 10000, seed + 1);
  verdict(10, "weighted copula modulus", stated.pass() && delta.pass(),
          fmt::format("modulus {} violations in {} pairs; Delta_n bound {} violations in {} draws",
                      stated.violations, stated.checks, delta.violations, delta.checks));
  detail(suite_line(stated));
  detail(suite_line(delta));
  for (auto form : {ModulusForm::UnitV, ModulusForm::OneSided, ModulusForm::Joint}) {
    detail("related form: " + suite_line(weighted_modulus_suite(form, 100, 10000, 10000, seed)));
  }
}

void harness_example(std::uint64_t seed, int threads) {
  const auto t0 = Clock::now();
  ExperimentConfig c = clayton_cell(500, seed);
  c.pairs = {{0.8, 0.85}};
  c.rho = 5.0;
  const Cell cell = experiment_cells(c).front();
  const auto rows = summarize(c, run_cell(c, cell, threads, c.B), false);
  const ResultRecord& cb = rows[1];
  const bool pass = std::abs(cb.bias) <= 0.05 && cb.coverage >= 0.85 && cb.coverage <= 0.95;
  fmt::print("[{}]  H harness cell n=2000 (0.8, 0.85): |bias|={:.4f} <= 0.05, coverage={:.3f} "
             "in [0.85, 0.95] (k={}, m={}, {:.1f}s)\n",
             pass ? "PASS" : "FAIL", std::abs(cb.bias), cb.coverage, cell.plan.k, cell.plan.m,
             since(t0));
  detail(fmt::format("raw: bias={:.4f} coverage={:.3f}", rows[0].bias, rows[0].coverage));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cbtail acceptance criteria"};
  std::uint64_t seed = 20240917;
  int threads = omp_get_max_threads();
  bool skip_long = false;
  app.add_option("--seed", seed, "Master seed")->capture_default_str();
  app.add_option("--threads", threads, "Threads for the Monte Carlo criteria")
      ->capture_default_str();
  app.add_flag("--skip-long", skip_long, "Skip criteria 6, 7 and the harness example");
  CLI11_PARSE(app, argc, argv);

  const auto t0 = Clock::now();
  fmt::print("cbtail acceptance run, seed {}, {} threads\n", seed, threads);
  criterion_operator(seed);
  criterion_lipschitz(seed);
  criterion_deviation(seed);
  criterion_bias_order();
  criterion_consistency(seed);
  if (!skip_long) criterion_clt(seed, threads);
  if (!skip_long) criterion_bootstrap(seed, threads);
  criterion_anchors(seed, threads);
  criterion_determinism(seed);
  criterion_weighted(seed);
  if (!skip_long) harness_example(seed, threads);
  fmt::print("{} criteria failed, total {:.1f}s\n", failures, since(t0));
  return std::min(failures, 125);
}
