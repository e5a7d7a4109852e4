#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cbtail/copula_models.hpp"

namespace cbtail {

enum class OutputFormat { Csv, Json };

// Simulation design. Defaults reproduce the reference study: n in
// {500, 1000, 2000}, (alpha, beta) in {(0.6, 0.75), (0.8, 0.85),
// (0.9, 0.95)}, B = 500 multiplier draws, 1000 replications, 90% level.
struct ExperimentConfig {
  CopulaModel model = CopulaModel::clayton(1.0);
  std::vector<std::size_t> ns{500, 1000, 2000};
  std::vector<std::pair<double, double>> pairs{{0.6, 0.75}, {0.8, 0.85}, {0.9, 0.95}};
  // alpha = 0.9 needs rho > 4.5 to be admissible.
  double rho = 5.0;
  TailSide side = TailSide::Lower;
  std::size_t B = 500;
  std::size_t reps = 1000;
  double level = 0.90;
  std::uint64_t seed = 20240917;
  int parallelism = 1;
  std::filesystem::path output = "results.csv";
  OutputFormat format = OutputFormat::Csv;
  bool record_timing = true;
};

inline constexpr int kConfigSchema = 1;

// INI-style file, e.g.
//
//   schema = 1
//   [experiment]
//   model = clayton
//   theta = 1
//   n = 500, 1000, 2000
//   pairs = 0.6:0.75, 0.8:0.85, 0.9:0.95
//
// See README for every key. Unknown keys and a missing or different schema
// are ConfigErrors. CBTAIL_OUTPUT_DIR, when set, replaces the directory of
// the output path.
ExperimentConfig parse_config(std::istream& in, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical text of the fields that determine the results (model, grid,
// rho, side, B, reps, level, seed); parallelism, output and timing are
// excluded so that they cannot change the provenance hash.
std::string canonical_config(const ExperimentConfig& config);
// 64-bit FNV-1a of canonical_config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

std::string to_string(TailSide side);
TailSide parse_side(const std::string& text);
OutputFormat parse_format(const std::string& text);

}  // namespace cbtail
