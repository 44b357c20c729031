#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rsl/asymptotics.hpp"
#include "rsl/distributions.hpp"
#include "rsl/recursion.hpp"
#include "rsl/report.hpp"

namespace rsl {

struct TailCurve {
  std::vector<double> grid;
  std::vector<double> p_hat;
  std::vector<double> se;  // sqrt(p_hat (1 - p_hat) / effective_n)
  std::size_t n = 0;
  std::size_t effective_n = 0;
  std::vector<std::size_t> exceedances;
};

// Counting estimator of P(V > x) on a non-decreasing grid. effective_n = 0
// means the samples are treated as independent.
TailCurve empirical_tail(std::span<const double> samples, std::span<const double> grid, std::size_t effective_n = 0);
TailCurve empirical_tail(const StationarySample& sample, std::span<const double> grid);

// Type-1 empirical quantiles, deduplicated and sorted.
std::vector<double> quantile_grid(std::span<const double> samples, std::span<const double> levels);

// {0.5, 0.8, 0.9, 0.95, 0.99, 0.999}
std::span<const double> default_quantile_levels();

struct RatioDiagnostic {
  std::vector<double> grid;
  std::vector<double> p_hat;
  std::vector<double> se;
  std::vector<double> predicted;
  std::vector<double> ratio;
  std::vector<double> ci_lo;
  std::vector<double> ci_hi;
  std::vector<double> log_var;  // variance of log p_hat
  std::size_t effective_n = 0;
  double z = 1.96;
  bool stabilized = false;
  std::vector<std::string> notes;
};

// Ratio of empirical survival to the predicted form with delta-method CIs
// (sampling error of p_hat and of the constant). Points without exceedances
// are dropped with a note.
RatioDiagnostic ratio_diagnostic(const TailCurve& curve, const AsymptoticPrediction& prediction,
                                 const DistributionSpec& x_law, double z = 1.96);

struct SlopeFit {
  double slope = 0.0;
  double se = 0.0;
  double intercept = 0.0;
  double intercept_se = 0.0;
  std::size_t points = 0;
};

// GLS fit of log(ratio) against x over the last `last_k` points, using the
// exact covariance of nested exceedance counts. |slope| < 2 se means flat.
SlopeFit log_ratio_slope(const RatioDiagnostic& diagnostic, std::size_t last_k = 3);

// GLS line through (x_i, y_i) with covariance cov (row-major k x k). With
// `fixed_slope`, only the intercept is fitted.
SlopeFit gls_line(std::span<const double> x, std::span<const double> y, std::span<const double> cov,
                  const double* fixed_slope = nullptr);

// Covariance of log p_hat_i for nested exceedance events x_0 < x_1 < ...:
// cov(i, j) = (1 - P_a) / (n P_a) with a = min(i, j).
std::vector<double> nested_log_covariance(std::span<const double> p_hat, std::size_t n);

struct RepresentationEstimate {
  double estimate = 0.0;
  double se = 0.0;
  double terms[3] = {0.0, 0.0, 0.0};
  double tilt = 0.0;
  std::size_t n_draws = 0;
  double max_weight_share = 0.0;
  bool degenerate = false;  // max_weight_share > 0.1
};

// P(W > x) through the three-term killed-walk representation, with the walk
// increments drawn from tilt(x_law, tilt_s) and reweighted by
// exp(-s S_N) phi(s)^N. tilt_s = 0 is plain Monte Carlo. W is resampled
// from w_sample. The X of the second term is drawn from x_law; the third
// term, which needs one more large jump, uses its own tilted X and weight
// exp(-s (S_N + X)) phi(s)^(N+1).
RepresentationEstimate tail_via_representation(double x, double p, const DistributionSpec& x_law,
                                               const StationarySample& w_sample, double tilt_s, std::size_t n_draws,
                                               std::uint64_t seed, unsigned workers = 1);

// The tilt s with p phi(s)^2 = 1, where the second moment of the weighted
// estimator of P(S_N > x) decays at rate 2s >= kappa.
double balanced_tilt(const DistributionSpec& x_law, double p);

// Kolmogorov-Smirnov two-sample test with asymptotic critical value
// c(alpha) sqrt((n + m) / (n m)).
TwoSampleResult two_sample_compare(std::span<const double> a, std::span<const double> b, double alpha = 0.01);

}  // namespace rsl
