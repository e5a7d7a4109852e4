#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cbtail/config.hpp"

namespace cbtail {

// One (cell, estimator) row of a simulation table. The first eleven
// fields are the CSV columns; the rest appear in JSON only.
struct ResultRecord {
  std::string model;
  std::size_t n = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::string estimator;  // "raw" or "checkerboard"
  double bias = 0.0;
  double mse = 0.0;
  double coverage = 0.0;
  double ci_length = 0.0;
  std::size_t reps = 0;
  double seconds = 0.0;

  std::size_t k = 0;
  int m = 0;
  double lambda = 0.0;         // oracle value the estimates are compared with
  double variance = 0.0;       // across-replication variance of λ̂
  double max_gap = 0.0;        // max |checkerboard - raw| over replications
  double gap_bound = 0.0;      // 4n/(k m)
  std::size_t clamped_cis = 0; // intervals clamped to [0, 1]
  bool degenerate = false;     // oracle asymptotic variance is 0

  bool operator==(const ResultRecord&) const = default;
};

struct Provenance {
  int schema = kConfigSchema;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string config;  // canonical_config text

  bool operator==(const Provenance&) const = default;
};

struct ResultSet {
  Provenance provenance;
  std::vector<ResultRecord> records;

  bool operator==(const ResultSet&) const = default;
};

inline constexpr const char* kCsvHeader =
    "model,n,alpha,beta,estimator,bias,mse,coverage,ci_length,reps,seconds";

// Header plus one row per record; reals with 6 significant digits.
void write_csv(std::ostream& out, const std::vector<ResultRecord>& records);
// Provenance block plus full-precision records.
void write_json(std::ostream& out, const ResultSet& results);
ResultSet read_json(std::istream& in);

// Writes to `path` (creating parent directories) in the given format.
void write_results(const std::filesystem::path& path, const ResultSet& results,
                   OutputFormat format);

}  // namespace cbtail
