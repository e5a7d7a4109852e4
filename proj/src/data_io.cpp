#include "cbtail/data_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cbtail/errors.hpp"

namespace cbtail {

namespace {

bool is_separator(char c) { return c == ',' || c == ' ' || c == '\t' || c == '\r'; }

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_separator(line[i])) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !is_separator(line[j])) ++j;
    out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace

BivariateSample read_sample(std::istream& in) {
  BivariateSample sample;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    const auto start = view.find_first_not_of(" \t\r");
    if (start == std::string_view::npos || view[start] == '#') continue;
    const auto fields = split_fields(view);
    std::optional<double> x, y;
    if (fields.size() == 2) {
      x = parse_number(fields[0]);
      y = parse_number(fields[1]);
    }
    if (!x || !y) {
      if (first && fields.size() == 2) {
        first = false;
        continue;  // header
      }
      throw IoError(fmt::format("line {}: expected two numeric columns, got '{}'", line_no,
                                line));
    }
    first = false;
    sample.xs.push_back(*x);
    sample.ys.push_back(*y);
  }
  if (in.bad()) throw IoError("read error on sample input");
  if (sample.xs.empty()) throw IoError("sample input holds no data rows");
  return sample;
}

BivariateSample read_sample_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open sample file '{}'", path.string()));
  return read_sample(in);
}

void write_sample(std::ostream& out, const BivariateSample& sample) {
  out << "x,y\n";
  for (std::size_t i = 0; i < sample.size(); ++i) {
    fmt::print(out, "{:.17g},{:.17g}\n", sample.xs[i], sample.ys[i]);
  }
  if (!out) throw IoError("failed to write sample");
}

}  // namespace cbtail
