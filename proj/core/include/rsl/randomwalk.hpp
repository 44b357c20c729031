#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rsl/distributions.hpp"
#include "rsl/recursion.hpp"
#include "rsl/report.hpp"

namespace rsl {

// N with P(N = k) = (1-p) p^k: the number of +1 signs before the first -1.
struct GeometricHorizon {
  double p;
  std::uint64_t n;
  std::uint64_t k() const { return n + 1; }
};

GeometricHorizon sample_horizon(double p, RandomStream& rng);

// Functionals of S_i = X_1 + ... + X_i along one walk of length K = N + 1.
struct WalkFunctionals {
  double s_n;  // S_N
  double s_k;  // S_K
  double t_n;  // max_{0<=i<=N} S_i
  double t_k;  // max_{0<=i<=K} S_i
  std::uint64_t n;
};

WalkFunctionals sample_functionals(double p, const DistributionSpec& x_law, RandomStream& rng);

// T_N as sup_{n>=0} (U_1 + ... + U_n), U_i = X_i w.p. p and -inf otherwise.
// The -inf increment is an absorbing flag; the result is always finite.
double sample_tn_sup(double p, const DistributionSpec& x_law, RandomStream& rng);

enum class WalkColumn { SN, SK, TN, TK, TNSup };

// n independent draws of one functional, partitioned into blocks with their
// own streams (deterministic for any worker count).
std::vector<double> sample_walk_column(double p, const DistributionSpec& x_law, WalkColumn column, std::size_t n,
                                       std::uint64_t seed, unsigned workers = 1);

// P(T_K > x) against P(T_N > x) / p on independent pools of n_draws each.
IdentityReport verify_tk_tn_identity(double p, const DistributionSpec& x_law, std::span<const double> grid,
                                     std::size_t n_draws, std::uint64_t seed, unsigned workers = 1);

// KS comparison of T_N drawn directly and through the absorbing U-walk.
TwoSampleResult verify_tn_sup_representation(double p, const DistributionSpec& x_law, std::size_t n_draws,
                                             std::uint64_t seed, unsigned workers = 1);

struct BoundPoint {
  double x = 0.0;
  double w = 0.0;  // P(W > x)
  double w_se = 0.0;
  double upper = 0.0;  // P(T_K > x)
  double upper_se = 0.0;
  double lower = 0.0;  // P((T_K - W')^+ > x)
  double lower_se = 0.0;
  double z_upper = 0.0;  // (w - upper) / joint SE, should be <= tolerance
  double z_lower = 0.0;  // (lower - w) / joint SE, should be <= tolerance
  bool pass = false;
};

struct BoundsReport {
  double tolerance_z = kDefaultZ;
  std::vector<BoundPoint> points;
  bool passed = false;
};

// Stochastic sandwich (T_K - W')^+ <= W <= T_K in survival order. W and W'
// come from two independent stationary samples of size n_draws.
BoundsReport verify_stochastic_bounds(const RecursionConfig& config, std::span<const double> grid,
                                      std::size_t n_draws, unsigned workers = 1);

}  // namespace rsl
