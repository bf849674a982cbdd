#pragma once

/**
 * @file cli.hpp
 * @brief Command-line front end, callable in-process.
 *
 * Subcommands: dist, enumerate, simulate, alt, analyze, trajectory, verify.
 * Results go to `out` (JSON by default, CSV with --format csv, a text table
 * for verify), diagnostics to `err`.  The final line on `out` is always the
 * run manifest; everything above it is byte-identical for identical seeds,
 * flags, and parameter files, regardless of --jobs.
 *
 * Exit codes: 0 success, 1 usage or input error, 2 verification failure,
 * 3 singular or degenerate parameter.
 */

#include <iosfwd>
#include <string>
#include <vector>

namespace bullets {

/// One CLI invocation.  `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace bullets
