#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "output.hpp"

namespace rsl::cli {

enum ExitCode : int { kOk = 0, kValidationFailure = 1, kRegimeFailure = 2, kVerifyFailure = 3 };

// Entry point of the rsl tool: rsl <command> [--config PATH] [--seed N]
// [--n N] [--workers N] [--out DIR] [--grid x1,x2,...].
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct VerifyCase {
  std::string label;
  double p;
  DistributionSpec law;
};

// One law per regime plus a p = 1 law for the continuity identity.
std::vector<VerifyCase> default_verify_matrix();

// Runs every identity check that applies to (law, p).
Json verify_case(const VerifyCase& c, const ExperimentConfig& config);

// predict + empirical tail + ratio diagnostics. Fills tail_csv_text.
Json build_report(const ExperimentConfig& config, std::string& tail_csv_text);

}  // namespace rsl::cli
