#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rsl/distributions.hpp"

namespace rsl {

enum class Sign : int { Minus = -1, Plus = 1 };

// One step of W <- (Y W + X)^+.
inline double step(double w, double x, Sign y) {
  const double v = (y == Sign::Plus ? w : -w) + x;
  return v > 0.0 ? v : 0.0;
}

// Multiplicative form of the recursion: R = exp(W), Q = exp(X), M = 1{Y=+1} Q.
struct GoldieState {
  double r;
  double m_mult;
  double q_mult;
};

// max(1, Q/R, M R)
inline double goldie_step(const GoldieState& s) {
  double v = s.q_mult / s.r;
  const double mr = s.m_mult * s.r;
  if (mr > v) v = mr;
  return v > 1.0 ? v : 1.0;
}

// Record from the first visit to 0 on; `spacing` keeps every spacing-th state.
struct Regenerative {
  std::size_t min_cycles = 10'000;
  std::size_t spacing = 10;
};

struct BurnInThin {
  std::size_t burn_in = 10'000;
  std::size_t thin = 10;
};

using SamplingPolicy = std::variant<Regenerative, BurnInThin>;

std::string describe(const SamplingPolicy& policy);

struct RecursionConfig {
  double p;
  DistributionSpec x_law;
  std::uint64_t seed = 0;
  SamplingPolicy policy = Regenerative{};
  double w0 = 0.0;
};

struct SampleMeta {
  std::uint64_t seed = 0;
  double p = 0.0;
  std::uint64_t law_digest = 0;
  std::string law;
  std::string policy;
};

struct StationarySample {
  std::vector<double> values;
  // Regeneration epochs (visits to 0) inside the recorded segments.
  std::size_t n_cycles = 0;
  // Batch-means effective sample size; never exceeds values.size().
  std::size_t effective_n = 0;
  SampleMeta meta;
};

// Parameter checks only (p in [0,1], w0 >= 0, policy counts positive).
void validate(const RecursionConfig& config);

// Validation plus the stationarity conditions: P(X < 0) > 0, checked on
// 10^5 draws, and for p = 1 additionally E[X] < 0. Throws StabilityError.
void check_stability(const RecursionConfig& config);

// Fraction of n draws of X that are negative.
double negative_fraction(const DistributionSpec& law, std::uint64_t seed, std::size_t n);

// Path W_0 = w0, W_1, ..., W_n driven by i.i.d. (X_i, Y_i).
std::vector<double> simulate_path(const RecursionConfig& config, std::size_t n, double w0);

// n draws approximating the stationary law of W. Blocks of kBlockSize values
// are produced by independent chains; output is identical for any `workers`.
StationarySample stationary_sample(const RecursionConfig& config, std::size_t n, unsigned workers = 1);

// Batch-means (100 batches) effective sample size of indicator functionals
// of `values`, clipped to [1, values.size()].
std::size_t effective_sample_size(std::span<const double> values);

}  // namespace rsl
