#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cbtail/config.hpp"
#include "cbtail/multiplier_bootstrap.hpp"
#include "cbtail/results_io.hpp"
#include "cbtail/tuning.hpp"

namespace cbtail {

// One (n, alpha, beta) combination of the design. Cells are numbered
// n-major in the order the config lists them.
struct Cell {
  std::size_t index = 0;
  std::size_t n = 0;
  double alpha = 0.0;
  double beta = 0.0;
  TuningPlan plan;
};

// Throws InfeasibleTuningError naming the offending cell.
std::vector<Cell> experiment_cells(const ExperimentConfig& config);

struct ReplicateOutcome {
  double lambda_checkerboard = 0.0;
  double lambda_raw = 0.0;
  // Bootstrap results; left default when the cell runs without bootstrap.
  ConfidenceInterval ci_checkerboard;
  ConfidenceInterval ci_raw;
  double boot_sd_checkerboard = 0.0;
  double boot_sd_raw = 0.0;
};

// Replicate r of cell c: data from make_stream(seed, {c, r, 0}); bootstrap
// replicate b from make_stream(seed, {c, r, 1, b}). B = 0 skips the
// bootstrap.
ReplicateOutcome run_replicate(const ExperimentConfig& config, const Cell& cell,
                               std::size_t rep, std::size_t B);

struct CellRun {
  Cell cell;
  double oracle_lambda = 0.0;
  bool degenerate = false;
  std::vector<ReplicateOutcome> reps;  // indexed by replicate
  double seconds = 0.0;
};

// All config.reps replicates of one cell, OpenMP-parallel over replicates
// when threads > 1; outcomes are stored by replicate index so the result
// does not depend on the schedule.
CellRun run_cell(const ExperimentConfig& config, const Cell& cell, int threads,
                 std::size_t B);

// Raw and checkerboard rows, aggregated in replicate order.
std::vector<ResultRecord> summarize(const ExperimentConfig& config, const CellRun& run,
                                    bool record_timing);

struct HarnessOptions {
  int threads = 1;
  bool record_timing = true;
  std::function<void(const std::string&)> progress;
};

// Throws UnsupportedModelError when no oracle λ is available for the model.
ResultSet run_experiment(const ExperimentConfig& config, const HarnessOptions& options = {});

}  // namespace cbtail
