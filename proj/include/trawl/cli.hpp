#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>

#include "trawl/dist.hpp"

namespace trawl {

enum ExitCode { kExitOk = 0, kExitFailure = 1, kExitBadInput = 2, kExitUnsupported = 3 };

// Entry point of the command-line tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Throws UnsupportedError when the observations cannot come from the seed family.
void check_path_support(const SeedDistribution& seed, std::span<const double> x);

}  // namespace trawl
