#include "rsl/randomwalk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rsl/error.hpp"
#include "rsl/parallel.hpp"
#include "rsl/tailstats.hpp"
#include "streams.hpp"

namespace rsl {
namespace {

void require_horizon_p(double p) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw DomainError("geometric horizon needs p in [0, 1); p = 1 makes N infinite almost surely");
  }
}

std::vector<double> survival_counts(std::span<const double> draws, std::span<const double> grid) {
  return empirical_tail(draws, grid).p_hat;
}

double binomial_se(double p_hat, std::size_t n) {
  return std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat)) / static_cast<double>(n));
}

}  // namespace

double joint_z(double a, double se_a, double b, double se_b) {
  const double se = std::sqrt(se_a * se_a + se_b * se_b);
  const double diff = a - b;
  if (se > 0.0) return diff / se;
  if (diff == 0.0) return 0.0;
  return diff > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

void finalize(IdentityReport& report) {
  report.max_abs_z = 0.0;
  report.passed = true;
  for (auto& pt : report.points) {
    pt.z = joint_z(pt.lhs, pt.lhs_se, pt.rhs, pt.rhs_se);
    pt.pass = std::abs(pt.z) <= report.tolerance_z;
    report.max_abs_z = std::max(report.max_abs_z, std::abs(pt.z));
    report.passed = report.passed && pt.pass;
  }
}

GeometricHorizon sample_horizon(double p, RandomStream& rng) {
  require_horizon_p(p);
  if (p == 0.0) return {p, 0};
  // P(N >= k) = p^k
  const double n = std::floor(std::log(rng.uniform_open()) / std::log(p));
  return {p, static_cast<std::uint64_t>(n)};
}

WalkFunctionals sample_functionals(double p, const DistributionSpec& x_law, RandomStream& rng) {
  const GeometricHorizon horizon = sample_horizon(p, rng);
  double s = 0.0;
  double t = 0.0;
  for (std::uint64_t i = 0; i < horizon.n; ++i) {
    s += sample(x_law, rng);
    t = std::max(t, s);
  }
  const double s_k = s + sample(x_law, rng);
  return {s, s_k, t, std::max(t, s_k), horizon.n};
}

double sample_tn_sup(double p, const DistributionSpec& x_law, RandomStream& rng) {
  require_horizon_p(p);
  double s = 0.0;
  double sup = 0.0;  // the empty sum is part of the supremum
  bool absorbed = false;
  while (!absorbed) {
    if (rng.uniform() < p) {
      s += sample(x_law, rng);
      sup = std::max(sup, s);
    } else {
      absorbed = true;
    }
  }
  return sup;
}

std::vector<double> sample_walk_column(double p, const DistributionSpec& x_law, WalkColumn column, std::size_t n,
                                       std::uint64_t seed, unsigned workers) {
  require_horizon_p(p);
  std::vector<double> out(n);
  const std::uint64_t domain = column == WalkColumn::TNSup ? streams::kSupWalk : streams::kWalk;
  for_each_block(block_count(n), workers, [&](std::size_t b) {
    RandomStream rng(seed, stream_key(domain, b));
    const std::size_t end = std::min(n, (b + 1) * kBlockSize);
    for (std::size_t i = b * kBlockSize; i < end; ++i) {
      if (column == WalkColumn::TNSup) {
        out[i] = sample_tn_sup(p, x_law, rng);
        continue;
      }
      const WalkFunctionals f = sample_functionals(p, x_law, rng);
      switch (column) {
        case WalkColumn::SN:
          out[i] = f.s_n;
          break;
        case WalkColumn::SK:
          out[i] = f.s_k;
          break;
        case WalkColumn::TN:
          out[i] = f.t_n;
          break;
        default:
          out[i] = f.t_k;
          break;
      }
    }
  });
  return out;
}

IdentityReport verify_tk_tn_identity(double p, const DistributionSpec& x_law, std::span<const double> grid,
                                     std::size_t n_draws, std::uint64_t seed, unsigned workers) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("verify_tk_tn_identity: p must lie in (0, 1)");
  for (double x : grid) {
    if (!(x >= 0.0)) throw DomainError("verify_tk_tn_identity: the identity holds for x >= 0 only");
  }
  const auto tk = sample_walk_column(p, x_law, WalkColumn::TK, n_draws, derive_seed(seed, 1), workers);
  const auto tn = sample_walk_column(p, x_law, WalkColumn::TN, n_draws, derive_seed(seed, 2), workers);
  const auto sk = survival_counts(tk, grid);
  const auto sn = survival_counts(tn, grid);

  IdentityReport report;
  report.name = "P(T_K > x) = P(T_N > x) / p";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    PointCheck pt;
    pt.x = grid[i];
    pt.lhs = sk[i];
    pt.lhs_se = binomial_se(sk[i], n_draws);
    pt.rhs = sn[i] / p;
    pt.rhs_se = binomial_se(sn[i], n_draws) / p;
    report.points.push_back(pt);
  }
  finalize(report);
  return report;
}

TwoSampleResult verify_tn_sup_representation(double p, const DistributionSpec& x_law, std::size_t n_draws,
                                              std::uint64_t seed, unsigned workers) {
  const auto direct = sample_walk_column(p, x_law, WalkColumn::TN, n_draws, derive_seed(seed, 1), workers);
  const auto via_sup = sample_walk_column(p, x_law, WalkColumn::TNSup, n_draws, derive_seed(seed, 2), workers);
  return two_sample_compare(direct, via_sup);
}

BoundsReport verify_stochastic_bounds(const RecursionConfig& config, std::span<const double> grid,
                                      std::size_t n_draws, unsigned workers) {
  RecursionConfig cfg_w = config;
  RecursionConfig cfg_w2 = config;
  cfg_w2.seed = derive_seed(config.seed, streams::kBounds);
  const StationarySample w = stationary_sample(cfg_w, n_draws, workers);
  const StationarySample w2 = stationary_sample(cfg_w2, n_draws, workers);

  const std::uint64_t walk_seed = derive_seed(config.seed, streams::kBounds + 1);
  const auto tk = sample_walk_column(config.p, config.x_law, WalkColumn::TK, n_draws, walk_seed, workers);
  std::vector<double> lower(n_draws);
  for (std::size_t i = 0; i < n_draws; ++i) lower[i] = std::max(0.0, tk[i] - w2.values[i]);

  const TailCurve tw = empirical_tail(w, grid);
  const TailCurve tu = empirical_tail(tk, grid);
  // The lower bound inherits the dependence of the W' chain.
  const TailCurve tl = empirical_tail(lower, grid, w2.effective_n);

  BoundsReport report;
  report.passed = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    BoundPoint pt;
    pt.x = grid[i];
    pt.w = tw.p_hat[i];
    pt.w_se = tw.se[i];
    pt.upper = tu.p_hat[i];
    pt.upper_se = tu.se[i];
    pt.lower = tl.p_hat[i];
    pt.lower_se = tl.se[i];
    pt.z_upper = joint_z(pt.w, pt.w_se, pt.upper, pt.upper_se);
    pt.z_lower = joint_z(pt.lower, pt.lower_se, pt.w, pt.w_se);
    pt.pass = pt.z_upper <= report.tolerance_z && pt.z_lower <= report.tolerance_z;
    report.passed = report.passed && pt.pass;
    report.points.push_back(pt);
  }
  return report;
}

}  // namespace rsl
