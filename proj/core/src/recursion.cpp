#include "rsl/recursion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rsl/error.hpp"
#include "rsl/parallel.hpp"
#include "streams.hpp"

namespace rsl {
namespace {

constexpr std::size_t kStabilityDraws = 100'000;
constexpr std::size_t kEssBatches = 100;
// A chain that has not visited 0 after this many steps is treated as unstable.
constexpr std::size_t kMaxStepsToRegeneration = 100'000'000;

inline Sign draw_sign(double p, RandomStream& rng) { return rng.uniform() < p ? Sign::Plus : Sign::Minus; }

inline double advance(double w, double p, const DistributionSpec& law, RandomStream& rng) {
  const Sign y = draw_sign(p, rng);
  const double x = sample(law, rng);
  return step(w, x, y);
}

struct Block {
  std::vector<double> values;
  std::size_t cycles = 0;
};

Block run_block(const RecursionConfig& config, std::size_t count, std::uint64_t block_index) {
  RandomStream rng(config.seed, stream_key(streams::kStationary, block_index));
  Block out;
  out.values.reserve(count);
  double w = config.w0;

  std::size_t spacing = 1;
  if (const auto* regen = std::get_if<Regenerative>(&config.policy)) {
    spacing = regen->spacing;
    std::size_t guard = 0;
    while (w != 0.0) {
      w = advance(w, config.p, config.x_law, rng);
      if (++guard > kMaxStepsToRegeneration) {
        throw StabilityError("stationary_sample: no visit to 0 within " + std::to_string(guard) + " steps");
      }
    }
  } else {
    const auto& burn = std::get<BurnInThin>(config.policy);
    spacing = burn.thin;
    for (std::size_t i = 0; i < burn.burn_in; ++i) w = advance(w, config.p, config.x_law, rng);
  }

  // The first recorded state is the current one; afterwards every spacing-th.
  for (;;) {
    out.values.push_back(w);
    if (w == 0.0) ++out.cycles;
    if (out.values.size() == count) break;
    for (std::size_t i = 0; i < spacing; ++i) {
      w = advance(w, config.p, config.x_law, rng);
      if (i + 1 < spacing && w == 0.0) ++out.cycles;
    }
  }
  return out;
}

double batch_ratio(std::span<const double> values, double threshold) {
  const std::size_t n = values.size();
  const std::size_t len = n / kEssBatches;
  double total = 0.0;
  std::vector<double> means(kEssBatches, 0.0);
  for (std::size_t b = 0; b < kEssBatches; ++b) {
    std::size_t hits = 0;
    for (std::size_t i = b * len; i < (b + 1) * len; ++i) hits += values[i] > threshold ? 1 : 0;
    means[b] = static_cast<double>(hits) / static_cast<double>(len);
    total += means[b];
  }
  const double mu = total / kEssBatches;
  const double var_iid = mu * (1.0 - mu);
  if (var_iid <= 0.0) return std::numeric_limits<double>::infinity();
  double ss = 0.0;
  for (double m : means) ss += (m - mu) * (m - mu);
  const double var_batch = ss / (kEssBatches - 1);
  if (var_batch <= 0.0) return std::numeric_limits<double>::infinity();
  // ESS / n = var_iid / (len * var of batch means)
  return var_iid / (static_cast<double>(len) * var_batch);
}

}  // namespace

std::string describe(const SamplingPolicy& policy) {
  if (const auto* r = std::get_if<Regenerative>(&policy)) {
    return "regenerative(min_cycles=" + std::to_string(r->min_cycles) + ",spacing=" + std::to_string(r->spacing) + ")";
  }
  const auto& b = std::get<BurnInThin>(policy);
  return "burn_in_thin(burn_in=" + std::to_string(b.burn_in) + ",thin=" + std::to_string(b.thin) + ")";
}

void validate(const RecursionConfig& config) {
  if (!(config.p >= 0.0 && config.p <= 1.0)) throw ValidationError("p must lie in [0, 1]");
  if (!(config.w0 >= 0.0) || !std::isfinite(config.w0)) throw ValidationError("w0 must be finite and >= 0");
  if (const auto* r = std::get_if<Regenerative>(&config.policy)) {
    if (r->spacing == 0) throw ValidationError("regenerative policy: spacing must be >= 1");
  } else if (std::get<BurnInThin>(config.policy).thin == 0) {
    throw ValidationError("burn-in policy: thin must be >= 1");
  }
}

double negative_fraction(const DistributionSpec& law, std::uint64_t seed, std::size_t n) {
  RandomStream rng(seed, stream_key(streams::kStability, 0));
  std::size_t negatives = 0;
  for (std::size_t i = 0; i < n; ++i) negatives += sample(law, rng) < 0.0 ? 1 : 0;
  return static_cast<double>(negatives) / static_cast<double>(n);
}

void check_stability(const RecursionConfig& config) {
  validate(config);
  if (negative_fraction(config.x_law, config.seed, kStabilityDraws) == 0.0) {
    throw StabilityError("no negative X in " + std::to_string(kStabilityDraws) +
                         " draws; the recursion needs P(X < 0) > 0 to be stable (" + describe(config.x_law) + ")");
  }
  if (config.p == 1.0) {
    const double m = mean(config.x_law);
    if (!(m < 0.0)) {
      throw StabilityError("p = 1 is the classical Lindley recursion and needs E[X] < 0; got E[X] = " +
                           std::to_string(m));
    }
  }
}

std::vector<double> simulate_path(const RecursionConfig& config, std::size_t n, double w0) {
  if (n < 1) throw ValidationError("simulate_path: n must be >= 1");
  RecursionConfig checked = config;
  checked.w0 = w0;
  validate(checked);
  RandomStream rng(config.seed, stream_key(streams::kPath, 0));
  std::vector<double> path;
  path.reserve(n + 1);
  path.push_back(w0);
  double w = w0;
  for (std::size_t i = 0; i < n; ++i) {
    w = advance(w, config.p, config.x_law, rng);
    path.push_back(w);
  }
  return path;
}

StationarySample stationary_sample(const RecursionConfig& config, std::size_t n, unsigned workers) {
  if (n < 1) throw ValidationError("stationary_sample: n must be >= 1");
  check_stability(config);

  const std::size_t n_blocks = block_count(n);
  std::vector<Block> blocks(n_blocks);
  for_each_block(n_blocks, workers, [&](std::size_t b) {
    const std::size_t count = std::min(kBlockSize, n - b * kBlockSize);
    blocks[b] = run_block(config, count, b);
  });

  StationarySample out;
  out.values.reserve(n);
  for (auto& block : blocks) {
    out.values.insert(out.values.end(), block.values.begin(), block.values.end());
    out.n_cycles += block.cycles;
  }
  if (const auto* regen = std::get_if<Regenerative>(&config.policy)) {
    if (out.n_cycles < regen->min_cycles) {
      throw InsufficientDataError("stationary_sample: observed " + std::to_string(out.n_cycles) +
                                  " regeneration cycles, fewer than min_cycles = " +
                                  std::to_string(regen->min_cycles) + "; increase n or spacing");
    }
  }
  out.effective_n = effective_sample_size(out.values);
  out.meta = SampleMeta{config.seed, config.p, digest(config.x_law), describe(config.x_law), describe(config.policy)};
  return out;
}

std::size_t effective_sample_size(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2 * kEssBatches) return n;
  std::vector<double> sorted(values.begin(), values.end());
  const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(sorted.begin(), mid, sorted.end());
  const double median = *mid;
  const auto hi = sorted.begin() + static_cast<std::ptrdiff_t>(9 * n / 10);
  std::nth_element(sorted.begin(), hi, sorted.end());
  const double q90 = *hi;

  double ratio = 1.0;
  for (double threshold : {0.0, median, q90}) ratio = std::min(ratio, batch_ratio(values, threshold));
  const double ess = std::floor(ratio * static_cast<double>(n));
  return static_cast<std::size_t>(std::clamp(ess, 1.0, static_cast<double>(n)));
}

}  // namespace rsl
