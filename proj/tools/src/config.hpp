#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsl/distributions.hpp"
#include "rsl/error.hpp"
#include "rsl/recursion.hpp"

namespace rsl::cli {

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct ExperimentConfig {
  double p = 0.5;
  std::optional<DistributionSpec> x_law;
  std::uint64_t seed = 0;
  std::size_t n = 1'000'000;       // stationary draws
  std::size_t walk_n = 1'000'000;  // random-walk draws
  unsigned workers = 1;
  SamplingPolicy policy = Regenerative{};
  // Empty means the default quantile grid of the sample.
  std::vector<double> grid;
  std::string out = ".";
};

// Command-line overrides, applied on top of the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  std::optional<std::string> grid;
};

// Parses a YAML document. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

DistributionSpec parse_law(const std::string& text);

// "0.5,1,2" -> {0.5, 1, 2}; must be strictly increasing.
std::vector<double> parse_grid(const std::string& text);

void apply(ExperimentConfig& config, const Overrides& overrides);

// Everything that determines results (workers and out excluded).
std::string canonical(const ExperimentConfig& config);

}  // namespace rsl::cli
