#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "cbtail/config.hpp"
#include "cbtail/data_io.hpp"
#include "cbtail/errors.hpp"
#include "cbtail/results_io.hpp"

using namespace cbtail;

namespace {

std::size_t count_columns(const std::string& line) {
  return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
}

ResultRecord sample_record() {
  ResultRecord r;
  r.model = "clayton(theta=1)";
  r.n = 2000;
  r.alpha = 0.8;
  r.beta = 0.85;
  r.estimator = "checkerboard";
  r.bias = -0.0123456789;
  r.mse = 0.00456789123;
  r.coverage = 0.897;
  r.ci_length = 0.1234567;
  r.reps = 1000;
  r.seconds = 12.3456789;
  r.k = 436;
  r.m = 638;
  r.lambda = 0.5;
  r.variance = 0.0041;
  r.max_gap = 0.001;
  r.gap_bound = 0.0287;
  r.clamped_cis = 3;
  return r;
}

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

TEST(DataIo, HeaderCommasAndComments) {
  std::istringstream in("# exported\nx,y\n1.5,2\n\n  3 , -4e-1\n# tail\n5\t6\n");
  const auto s = read_sample(in);
  EXPECT_EQ(s.xs, (std::vector<double>{1.5, 3, 5}));
  EXPECT_EQ(s.ys, (std::vector<double>{2, -0.4, 6}));
}

TEST(DataIo, WhitespaceOnlyWithoutHeader) {
  std::istringstream in("1 2\n3 4\n");
  EXPECT_EQ(read_sample(in).size(), 2u);
}

TEST(DataIo, MalformedLineNamesLine) {
  std::istringstream in("x,y\n1,2\n3\n");
  try {
    read_sample(in);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  std::istringstream extra("1,2,3\n");
  EXPECT_THROW(read_sample(extra), IoError);
  std::istringstream header_only("x,y\n");
  EXPECT_THROW(read_sample(header_only), IoError);
  EXPECT_THROW(read_sample_file("/nonexistent/file.csv"), IoError);
}

TEST(DataIo, TiesRejectedAtRanking) {
  std::istringstream in("1,2\n1,3\n2,4\n");
  const auto s = read_sample(in);
  EXPECT_THROW(ranks(s), TieError);
}

TEST(DataIo, WriteReadRoundTrip) {
  const BivariateSample s{{0.1, 1.0 / 3.0, -2e-300}, {1e300, 0.2, 5}};
  std::stringstream ss;
  write_sample(ss, s);
  const auto back = read_sample(ss);
  EXPECT_EQ(back.xs, s.xs);
  EXPECT_EQ(back.ys, s.ys);
}

TEST(Config, FullFile) {
  const auto c = parse(
      "schema = 1\n[experiment]\nmodel = student_t\nrho_corr = 0.5\nnu = 4\n"
      "n = 500, 1000\npairs = 0.5:0.8 0.6:0.75\nrho = 2\nside = upper\nB = 100\n"
      "reps = 20\nlevel = 0.95\nseed = 99\nparallelism = 3\noutput = out/r.json\n"
      "record_timing = false\n");
  EXPECT_EQ(c.model.describe(), "student_t(rho=0.5;nu=4)");
  EXPECT_EQ(c.ns, (std::vector<std::size_t>{500, 1000}));
  ASSERT_EQ(c.pairs.size(), 2u);
  EXPECT_EQ(c.pairs[1], (std::pair{0.6, 0.75}));
  EXPECT_EQ(c.rho, 2.0);
  EXPECT_EQ(c.side, TailSide::Upper);
  EXPECT_EQ(c.B, 100u);
  EXPECT_EQ(c.reps, 20u);
  EXPECT_EQ(c.level, 0.95);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.parallelism, 3);
  EXPECT_EQ(c.format, OutputFormat::Json);
  EXPECT_FALSE(c.record_timing);
}

TEST(Config, Defaults) {
  const auto c = parse("schema = 1\n[experiment]\nmodel = clayton\ntheta = 1\n");
  EXPECT_EQ(c.ns, (std::vector<std::size_t>{500, 1000, 2000}));
  ASSERT_EQ(c.pairs.size(), 3u);
  EXPECT_EQ(c.pairs[0], (std::pair{0.6, 0.75}));
  EXPECT_EQ(c.pairs[2], (std::pair{0.9, 0.95}));
  EXPECT_EQ(c.B, 500u);
  EXPECT_EQ(c.reps, 1000u);
  EXPECT_EQ(c.level, 0.90);
  EXPECT_EQ(c.side, TailSide::Lower);
  EXPECT_EQ(c.format, OutputFormat::Csv);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse("[experiment]\nmodel = clayton\ntheta = 1\n"), ConfigError);
  EXPECT_THROW(parse("schema = 2\n[experiment]\nmodel = clayton\ntheta = 1\n"), ConfigError);
  EXPECT_THROW(parse("schema = 1\n[experiment]\nmodel = clayton\ntheta = 1\nthetta = 2\n"),
               ConfigError);
  EXPECT_THROW(parse("schema = 1\n[experiment]\nmodel = student_t\nrho_corr = 0.5\n"),
               ConfigError);
  EXPECT_THROW(parse("schema = 1\n[experiment]\nmodel = clayton\ntheta = -1\n"), ConfigError);
  EXPECT_THROW(parse("schema = 1\n[experiment]\nmodel = frank\n"), ConfigError);
  EXPECT_THROW(parse("schema = 1\n[experiment]\nmodel = clayton\ntheta = 1\nB = 1\n"),
               ConfigError);
  EXPECT_THROW(parse("schema = 1\n[experiment]\nmodel = clayton\ntheta = 1\nlevel = 1.5\n"),
               ConfigError);
  EXPECT_THROW(parse("schema = 1\n[experiment]\nmodel = clayton\ntheta = 1\npairs = 0.5\n"),
               ConfigError);
  EXPECT_THROW(parse("schema = 1\n[experiment]\nmodel = clayton\ntheta = 1\nn = ten\n"),
               ConfigError);
  EXPECT_THROW(parse("schema = 1\n[other]\nx = 1\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.ini"), ConfigError);
}

TEST(Config, OutputDirectoryOverride) {
  ::setenv("CBTAIL_OUTPUT_DIR", "/tmp/cbtail-out", 1);
  const auto c = parse("schema = 1\n[experiment]\nmodel = comonotone\noutput = a/b/res.csv\n");
  ::unsetenv("CBTAIL_OUTPUT_DIR");
  EXPECT_EQ(c.output, std::filesystem::path("/tmp/cbtail-out/res.csv"));
}

TEST(Config, HashIgnoresExecutionSettings) {
  ExperimentConfig a;
  ExperimentConfig b = a;
  b.parallelism = 8;
  b.output = "elsewhere.json";
  b.record_timing = false;
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  b.seed += 1;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_NE(canonical_config(a).find("pairs=0.6:0.75,0.8:0.85,0.9:0.95"), std::string::npos);
}

TEST(Results, EmptyCsvIsHeaderOnly) {
  std::ostringstream out;
  write_csv(out, {});
  EXPECT_EQ(out.str(), std::string(kCsvHeader) + "\n");
}

TEST(Results, OneRecordOneRow) {
  std::ostringstream out;
  write_csv(out, {sample_record()});
  std::istringstream in(out.str());
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_FALSE(std::getline(in, extra));
  EXPECT_EQ(count_columns(header), 11u);
  EXPECT_EQ(count_columns(row), 11u);
  EXPECT_EQ(row,
            "clayton(theta=1),2000,0.8,0.85,checkerboard,-0.0123457,0.00456789,0.897,0.123457,"
            "1000,12.3457");
}

TEST(Results, JsonRoundTrip) {
  ResultSet rs;
  ExperimentConfig c;
  rs.provenance.config_hash = config_hash(c);
  rs.provenance.seed = c.seed;
  rs.provenance.config = canonical_config(c);
  rs.records = {sample_record(), sample_record()};
  rs.records[1].estimator = "raw";
  rs.records[1].degenerate = true;
  rs.records[1].bias = 1.0 / 3.0;
  std::stringstream ss;
  write_json(ss, rs);
  EXPECT_EQ(read_json(ss), rs);
}

TEST(Results, MalformedJson) {
  std::istringstream in("{\"records\": 3}");
  EXPECT_THROW(read_json(in), IoError);
}

TEST(Results, WriteCreatesDirectories) {
  const auto dir = std::filesystem::temp_directory_path() / "cbtail-test-results" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  ResultSet rs;
  rs.records = {sample_record()};
  write_results(dir / "r.json", rs, OutputFormat::Json);
  std::ifstream in(dir / "r.json");
  EXPECT_EQ(read_json(in), rs);
  write_results(dir / "r.csv", rs, OutputFormat::Csv);
  EXPECT_TRUE(std::filesystem::exists(dir / "r.csv"));
  std::filesystem::remove_all(dir.parent_path());
}
