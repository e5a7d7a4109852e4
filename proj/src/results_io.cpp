#include "cbtail/results_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "cbtail/errors.hpp"

namespace cbtail {

using nlohmann::json;

void write_csv(std::ostream& out, const std::vector<ResultRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    fmt::print(out, "{},{},{:.6g},{:.6g},{},{:.6g},{:.6g},{:.6g},{:.6g},{},{:.6g}\n", r.model,
               r.n, r.alpha, r.beta, r.estimator, r.bias, r.mse, r.coverage, r.ci_length, r.reps,
               r.seconds);
  }
  if (!out) throw IoError("failed to write CSV results");
}

void write_json(std::ostream& out, const ResultSet& results) {
  json doc;
  doc["schema"] = results.provenance.schema;
  doc["provenance"] = {{"config_hash", results.provenance.config_hash},
                       {"seed", results.provenance.seed},
                       {"config", results.provenance.config}};
  json records = json::array();
  for (const auto& r : results.records) {
    records.push_back({{"model", r.model},
                       {"n", r.n},
                       {"alpha", r.alpha},
                       {"beta", r.beta},
                       {"estimator", r.estimator},
                       {"bias", r.bias},
                       {"mse", r.mse},
                       {"coverage", r.coverage},
                       {"ci_length", r.ci_length},
                       {"reps", r.reps},
                       {"seconds", r.seconds},
                       {"k", r.k},
                       {"m", r.m},
                       {"lambda", r.lambda},
                       {"variance", r.variance},
                       {"max_gap", r.max_gap},
                       {"gap_bound", r.gap_bound},
                       {"clamped_cis", r.clamped_cis},
                       {"degenerate", r.degenerate}});
  }
  doc["records"] = std::move(records);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed to write JSON results");
}

ResultSet read_json(std::istream& in) {
  try {
    const json doc = json::parse(in);
    ResultSet rs;
    rs.provenance.schema = doc.at("schema").get<int>();
    const auto& p = doc.at("provenance");
    rs.provenance.config_hash = p.at("config_hash").get<std::string>();
    rs.provenance.seed = p.at("seed").get<std::uint64_t>();
    rs.provenance.config = p.at("config").get<std::string>();
    for (const auto& j : doc.at("records")) {
      ResultRecord r;
      r.model = j.at("model").get<std::string>();
      r.n = j.at("n").get<std::size_t>();
      r.alpha = j.at("alpha").get<double>();
      r.beta = j.at("beta").get<double>();
      r.estimator = j.at("estimator").get<std::string>();
      r.bias = j.at("bias").get<double>();
      r.mse = j.at("mse").get<double>();
      r.coverage = j.at("coverage").get<double>();
      r.ci_length = j.at("ci_length").get<double>();
      r.reps = j.at("reps").get<std::size_t>();
      r.seconds = j.at("seconds").get<double>();
      r.k = j.at("k").get<std::size_t>();
      r.m = j.at("m").get<int>();
      r.lambda = j.at("lambda").get<double>();
      r.variance = j.at("variance").get<double>();
      r.max_gap = j.at("max_gap").get<double>();
      r.gap_bound = j.at("gap_bound").get<double>();
      r.clamped_cis = j.at("clamped_cis").get<std::size_t>();
      r.degenerate = j.at("degenerate").get<bool>();
      rs.records.push_back(std::move(r));
    }
    return rs;
  } catch (const json::exception& e) {
    throw IoError(fmt::format("malformed results JSON: {}", e.what()));
  }
}

void write_results(const std::filesystem::path& path, const ResultSet& results,
                   OutputFormat format) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IoError(fmt::format("cannot create directory '{}': {}", path.parent_path().string(),
                                ec.message()));
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  if (format == OutputFormat::Csv) {
    write_csv(out, results.records);
  } else {
    write_json(out, results);
  }
}

}  // namespace cbtail
