#pragma once

#include <filesystem>
#include <iosfwd>

#include "cbtail/empirical_copula.hpp"

namespace cbtail {

// Two numeric columns per line, separated by a comma and/or whitespace.
// Blank lines and lines starting with '#' are skipped. The first remaining
// line is taken as a header when it does not parse as two numbers. Any
// other malformed line is an IoError naming its line number. Ties are not
// checked here; ranks() rejects them.
BivariateSample read_sample(std::istream& in);
BivariateSample read_sample_file(const std::filesystem::path& path);

// "x,y" lines with full precision, preceded by a header line.
void write_sample(std::ostream& out, const BivariateSample& sample);

}  // namespace cbtail
