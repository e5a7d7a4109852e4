#include "cbtail/sim_harness.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>

#include <fmt/format.h>

#include "cbtail/copula_models.hpp"
#include "cbtail/errors.hpp"
#include "cbtail/tail_estimation.hpp"

namespace cbtail {

std::vector<Cell> experiment_cells(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  for (std::size_t n : config.ns) {
    for (const auto& [alpha, beta] : config.pairs) {
      Cell c;
      c.index = cells.size();
      c.n = n;
      c.alpha = alpha;
      c.beta = beta;
      try {
        c.plan = plan(n, alpha, beta, config.rho);
      } catch (const InfeasibleTuningError& e) {
        throw InfeasibleTuningError(fmt::format("cell n={} alpha={} beta={}: {}", n, alpha,
                                                beta, e.what()));
      }
      cells.push_back(std::move(c));
    }
  }
  return cells;
}

ReplicateOutcome run_replicate(const ExperimentConfig& config, const Cell& cell,
                               std::size_t rep, std::size_t B) {
  Engine rng = make_stream(config.seed, {cell.index, rep, 0});
  const BivariateSample data = sample(config.model, cell.n, rng);
  const TailEstimator est(EmpiricalCopula(ranks(data)), cell.plan.k, cell.plan.m, config.side);

  ReplicateOutcome out;
  if (B == 0) {
    out.lambda_checkerboard = est.estimate_with(Smoothing::Checkerboard, 1.0, 1.0).value;
    out.lambda_raw = est.estimate_with(Smoothing::Raw, 1.0, 1.0).value;
    return out;
  }
  const StreamSeed seed{config.seed, {cell.index, rep, 1}};
  const BootstrapPair boot =
      bootstrap_pair_serial(est, MultiplierLaw::standard_exponential(), B, seed);
  out.lambda_checkerboard = boot.lambda_checkerboard;
  out.lambda_raw = boot.lambda_raw;
  out.ci_checkerboard =
      confidence_interval(boot.checkerboard, boot.lambda_checkerboard, cell.plan.k, config.level);
  out.ci_raw = confidence_interval(boot.raw, boot.lambda_raw, cell.plan.k, config.level);
  out.boot_sd_checkerboard = boot.checkerboard.sd();
  out.boot_sd_raw = boot.raw.sd();
  return out;
}

namespace {

TailOracle oracle_for(const ExperimentConfig& config) {
  try {
    return tail_oracle(config.model, config.side);
  } catch (const ExtrapolationError& e) {
    throw UnsupportedModelError(fmt::format("no tail oracle for {} ({} tail): {}",
                                            config.model.describe(), to_string(config.side),
                                            e.what()));
  }
}

}  // namespace

CellRun run_cell(const ExperimentConfig& config, const Cell& cell, int threads,
                 std::size_t B) {
  const TailOracle oracle = oracle_for(config);
  CellRun run;
  run.cell = cell;
  run.oracle_lambda = oracle.lambda;
  run.degenerate = oracle.sigma2 == 0.0;
  run.reps.resize(config.reps);

  const auto start = std::chrono::steady_clock::now();
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto count = static_cast<std::int64_t>(config.reps);
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(threads, 1))
  for (std::int64_t r = 0; r < count; ++r) {
    try {
      run.reps[r] = run_replicate(config, cell, static_cast<std::size_t>(r), B);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  run.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

std::vector<ResultRecord> summarize(const ExperimentConfig& config, const CellRun& run,
                                    bool record_timing) {
  const auto& plan = run.cell.plan;
  const double reps = static_cast<double>(run.reps.size());
  double max_gap = 0.0;
  for (const auto& o : run.reps) {
    max_gap = std::max(max_gap, std::abs(o.lambda_checkerboard - o.lambda_raw));
  }

  auto row = [&](const char* name, auto lambda_of, auto ci_of) {
    ResultRecord r;
    r.model = config.model.describe();
    r.n = run.cell.n;
    r.alpha = run.cell.alpha;
    r.beta = run.cell.beta;
    r.estimator = name;
    r.reps = run.reps.size();
    r.seconds = record_timing ? run.seconds : 0.0;
    r.k = plan.k;
    r.m = plan.m;
    r.lambda = run.oracle_lambda;
    r.max_gap = max_gap;
    r.gap_bound = checkerboard_tail_gap_bound(run.cell.n, plan.k, plan.m);
    r.degenerate = run.degenerate;

    double sum = 0.0, sum_sq = 0.0, covered = 0.0, length = 0.0;
    for (const auto& o : run.reps) {
      const double e = lambda_of(o) - run.oracle_lambda;
      sum += e;
      sum_sq += e * e;
      const ConfidenceInterval& ci = ci_of(o);
      covered += ci.contains(run.oracle_lambda) ? 1.0 : 0.0;
      length += ci.length();
      r.clamped_cis += ci.clamped ? 1 : 0;
    }
    r.bias = sum / reps;
    r.mse = sum_sq / reps;
    r.coverage = covered / reps;
    r.ci_length = length / reps;
    double var = 0.0;
    for (const auto& o : run.reps) {
      const double d = lambda_of(o) - run.oracle_lambda - r.bias;
      var += d * d;
    }
    r.variance = var / reps;
    return r;
  };

  return {row("raw", [](const ReplicateOutcome& o) { return o.lambda_raw; },
              [](const ReplicateOutcome& o) -> const ConfidenceInterval& { return o.ci_raw; }),
          row("checkerboard", [](const ReplicateOutcome& o) { return o.lambda_checkerboard; },
              [](const ReplicateOutcome& o) -> const ConfidenceInterval& {
                return o.ci_checkerboard;
              })};
}

ResultSet run_experiment(const ExperimentConfig& config, const HarnessOptions& options) {
  const std::vector<Cell> cells = experiment_cells(config);
  oracle_for(config);  // fail before any work

  ResultSet out;
  out.provenance.config_hash = config_hash(config);
  out.provenance.seed = config.seed;
  out.provenance.config = canonical_config(config);
  for (const Cell& cell : cells) {
    if (options.progress) {
      options.progress(fmt::format("cell {}/{}: n={} alpha={} beta={} k={} m={}", cell.index + 1,
                                   cells.size(), cell.n, cell.alpha, cell.beta, cell.plan.k,
                                   cell.plan.m));
    }
    const CellRun run = run_cell(config, cell, options.threads, config.B);
    for (auto& r : summarize(config, run, options.record_timing)) {
      out.records.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace cbtail
