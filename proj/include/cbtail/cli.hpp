#pragma once

#include <iosfwd>

namespace cbtail {

// Entry point of the `cbtail` executable. Subcommands: tune, estimate,
// simulate, selftest. Returns 0 on success. Library errors are reported on
// `err` as "cbtail: error[<kind>]: <message>" with exit code 2; usage
// errors return CLI11's code; failing self-test suites return 1.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cbtail
