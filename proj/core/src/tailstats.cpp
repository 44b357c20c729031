#include "rsl/tailstats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "rsl/error.hpp"
#include "rsl/parallel.hpp"
#include "rsl/randomwalk.hpp"
#include "streams.hpp"

namespace rsl {
namespace {

constexpr std::array<double, 6> kDefaultLevels{0.5, 0.8, 0.9, 0.95, 0.99, 0.999};
constexpr double kDegenerateShare = 0.1;

// In-place Cholesky of a k x k SPD matrix (row-major, lower triangle).
bool cholesky(std::vector<double>& a, std::size_t k) {
  for (std::size_t j = 0; j < k; ++j) {
    double d = a[j * k + j];
    for (std::size_t s = 0; s < j; ++s) d -= a[j * k + s] * a[j * k + s];
    if (!(d > 0.0)) return false;
    d = std::sqrt(d);
    a[j * k + j] = d;
    for (std::size_t i = j + 1; i < k; ++i) {
      double v = a[i * k + j];
      for (std::size_t s = 0; s < j; ++s) v -= a[i * k + s] * a[j * k + s];
      a[i * k + j] = v / d;
    }
  }
  return true;
}

// Solves L L^T z = b in place.
void cholesky_solve(const std::vector<double>& l, std::size_t k, std::vector<double>& b) {
  for (std::size_t i = 0; i < k; ++i) {
    double v = b[i];
    for (std::size_t s = 0; s < i; ++s) v -= l[i * k + s] * b[s];
    b[i] = v / l[i * k + i];
  }
  for (std::size_t i = k; i-- > 0;) {
    double v = b[i];
    for (std::size_t s = i + 1; s < k; ++s) v -= l[s * k + i] * b[s];
    b[i] = v / l[i * k + i];
  }
}

std::string fmt_g(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

TailCurve empirical_tail(std::span<const double> samples, std::span<const double> grid, std::size_t effective_n) {
  if (!std::is_sorted(grid.begin(), grid.end())) throw ValidationError("empirical_tail: grid must be increasing");
  const std::size_t g = grid.size();
  std::vector<std::size_t> hist(g + 1, 0);
  for (double v : samples) {
    // number of grid points strictly below v
    const auto idx = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), v) - grid.begin());
    ++hist[idx];
  }
  TailCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.n = samples.size();
  curve.effective_n = effective_n == 0 ? curve.n : std::min(effective_n, curve.n);
  curve.exceedances.assign(g, 0);
  std::size_t above = 0;
  for (std::size_t j = g; j-- > 0;) {
    above += hist[j + 1];
    curve.exceedances[j] = above;
  }
  curve.p_hat.resize(g);
  curve.se.resize(g);
  for (std::size_t j = 0; j < g; ++j) {
    const double ph = curve.n == 0 ? 0.0 : static_cast<double>(curve.exceedances[j]) / static_cast<double>(curve.n);
    curve.p_hat[j] = ph;
    curve.se[j] = curve.n == 0 ? 0.0 : std::sqrt(ph * (1.0 - ph) / static_cast<double>(curve.effective_n));
  }
  return curve;
}

TailCurve empirical_tail(const StationarySample& sample, std::span<const double> grid) {
  return empirical_tail(sample.values, grid, sample.effective_n);
}

std::span<const double> default_quantile_levels() { return kDefaultLevels; }

std::vector<double> quantile_grid(std::span<const double> samples, std::span<const double> levels) {
  if (samples.empty()) throw InsufficientDataError("quantile_grid: no samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<double> grid;
  for (double q : levels) {
    if (!(q > 0.0 && q < 1.0)) throw ValidationError("quantile_grid: levels must lie in (0, 1)");
    const auto idx = static_cast<std::size_t>(std::max(1.0, std::ceil(q * n))) - 1;
    grid.push_back(sorted[idx]);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<double> nested_log_covariance(std::span<const double> p_hat, std::size_t n) {
  const std::size_t k = p_hat.size();
  std::vector<double> cov(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double pa = p_hat[std::min(i, j)];
      cov[i * k + j] = (1.0 - pa) / (static_cast<double>(n) * pa);
    }
  }
  return cov;
}

SlopeFit gls_line(std::span<const double> x, std::span<const double> y, std::span<const double> cov,
                  const double* fixed_slope) {
  const std::size_t k = x.size();
  if (k != y.size() || cov.size() != k * k) throw ValidationError("gls_line: size mismatch");
  if (k < (fixed_slope ? 1u : 2u)) throw InsufficientDataError("gls_line: too few points");
  std::vector<double> l(cov.begin(), cov.end());
  if (!cholesky(l, k)) throw InsufficientDataError("gls_line: covariance is singular (p_hat of 0 or 1?)");

  auto weighted = [&](std::vector<double> v) {
    cholesky_solve(l, k, v);
    return v;
  };
  std::vector<double> ones(k, 1.0);
  const auto w1 = weighted(ones);
  const auto wx = weighted(std::vector<double>(x.begin(), x.end()));
  double s11 = 0, s1x = 0, sxx = 0, s1y = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    s11 += w1[i];
    s1x += w1[i] * x[i];
    sxx += wx[i] * x[i];
    s1y += w1[i] * y[i];
    sxy += wx[i] * y[i];
  }
  SlopeFit fit;
  fit.points = k;
  if (fixed_slope) {
    fit.slope = *fixed_slope;
    fit.intercept = (s1y - *fixed_slope * s1x) / s11;
    fit.intercept_se = std::sqrt(1.0 / s11);
    fit.se = 0.0;
    return fit;
  }
  const double det = s11 * sxx - s1x * s1x;
  if (!(det > 0.0)) throw InsufficientDataError("gls_line: degenerate design");
  fit.slope = (s11 * sxy - s1x * s1y) / det;
  fit.intercept = (sxx * s1y - s1x * sxy) / det;
  fit.se = std::sqrt(s11 / det);
  fit.intercept_se = std::sqrt(sxx / det);
  return fit;
}

RatioDiagnostic ratio_diagnostic(const TailCurve& curve, const AsymptoticPrediction& prediction,
                                 const DistributionSpec& x_law, double z) {
  RatioDiagnostic d;
  d.z = z;
  d.effective_n = curve.effective_n;
  const double const_rel_var =
      prediction.constant > 0.0 ? std::pow(prediction.constant_se / prediction.constant, 2) : 0.0;
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    const double x = curve.grid[i];
    if (curve.exceedances[i] == 0) {
      d.notes.push_back("x=" + fmt_g(x) + " dropped: no exceedances");
      continue;
    }
    const double pred = predicted_tail(prediction, x_law, x);
    if (!(pred > 0.0)) {
      d.notes.push_back("x=" + fmt_g(x) + " dropped: predicted tail is 0");
      continue;
    }
    const double ph = curve.p_hat[i];
    const double ratio = ph / pred;
    const double log_var = (1.0 - ph) / (static_cast<double>(curve.effective_n) * ph);
    const double half = z * ratio * std::sqrt(log_var + const_rel_var);
    d.grid.push_back(x);
    d.p_hat.push_back(ph);
    d.se.push_back(curve.se[i]);
    d.predicted.push_back(pred);
    d.ratio.push_back(ratio);
    d.ci_lo.push_back(ratio - half);
    d.ci_hi.push_back(ratio + half);
    d.log_var.push_back(log_var);
  }
  const std::size_t k = d.grid.size();
  if (k >= 3) {
    const double lo = std::max({d.ci_lo[k - 1], d.ci_lo[k - 2], d.ci_lo[k - 3]});
    const double hi = std::min({d.ci_hi[k - 1], d.ci_hi[k - 2], d.ci_hi[k - 3]});
    d.stabilized = lo <= hi;
  }
  return d;
}

SlopeFit log_ratio_slope(const RatioDiagnostic& diagnostic, std::size_t last_k) {
  const std::size_t k = diagnostic.grid.size();
  if (k < 2 || last_k < 2) throw InsufficientDataError("log_ratio_slope: need at least two points");
  const std::size_t use = std::min(last_k, k);
  const std::size_t first = k - use;
  std::vector<double> x(diagnostic.grid.begin() + first, diagnostic.grid.end());
  std::vector<double> y;
  for (std::size_t i = first; i < k; ++i) y.push_back(std::log(diagnostic.ratio[i]));
  std::vector<double> ph(diagnostic.p_hat.begin() + first, diagnostic.p_hat.end());
  const auto cov = nested_log_covariance(ph, diagnostic.effective_n);
  return gls_line(x, y, cov);
}

RepresentationEstimate tail_via_representation(double x, double p, const DistributionSpec& x_law,
                                               const StationarySample& w_sample, double tilt_s, std::size_t n_draws,
                                               std::uint64_t seed, unsigned workers) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("tail_via_representation: p must lie in (0, 1)");
  if (n_draws == 0) throw ValidationError("tail_via_representation: n_draws must be >= 1");
  if (w_sample.values.empty()) throw InsufficientDataError("tail_via_representation: empty W sample");
  const DistributionSpec walk_law = tilt(x_law, tilt_s);
  const double log_phi = tilt_s == 0.0 ? 0.0 : std::log(mgf(x_law, tilt_s));
  const double c = p / (1.0 - p);
  const auto& pool = w_sample.values;

  struct Acc {
    double sum = 0, sum_sq = 0, max_f = 0;
    double terms[3] = {0, 0, 0};
  };
  const std::size_t n_blocks = block_count(n_draws);
  std::vector<Acc> acc(n_blocks);
  for_each_block(n_blocks, workers, [&](std::size_t b) {
    RandomStream rng(seed, stream_key(streams::kImportance, b));
    Acc a;
    const std::size_t end = std::min(n_draws, (b + 1) * kBlockSize);
    for (std::size_t i = b * kBlockSize; i < end; ++i) {
      const GeometricHorizon h = sample_horizon(p, rng);
      double s = 0.0;
      for (std::uint64_t j = 0; j < h.n; ++j) s += sample(walk_law, rng);
      const double weight = tilt_s == 0.0 ? 1.0 : std::exp(-tilt_s * s + static_cast<double>(h.n) * log_phi);
      const double xv = sample(x_law, rng);
      // The third term needs one more large jump, so its X is drawn from the
      // tilted law with its own likelihood ratio.
      const double xt = sample(walk_law, rng);
      const double weight_t = tilt_s == 0.0 ? 1.0 : weight * std::exp(log_phi - tilt_s * xt);
      const double w = pool[rng.below(pool.size())];
      const double t1 = s > x ? weight : 0.0;
      const double t2 = (s > x && xv + w + s <= x) ? c * weight : 0.0;
      const double t3 = (s <= x && xt - w + s > x) ? weight_t : 0.0;
      const double f = t1 + t2 + t3;
      a.sum += f;
      a.sum_sq += f * f;
      a.max_f = std::max(a.max_f, f);
      a.terms[0] += t1;
      a.terms[1] += t2;
      a.terms[2] += t3;
    }
    acc[b] = a;
  });

  Acc total;
  for (const Acc& a : acc) {
    total.sum += a.sum;
    total.sum_sq += a.sum_sq;
    total.max_f = std::max(total.max_f, a.max_f);
    for (int t = 0; t < 3; ++t) total.terms[t] += a.terms[t];
  }
  const double n = static_cast<double>(n_draws);
  RepresentationEstimate out;
  out.estimate = total.sum / n;
  const double var = n > 1 ? std::max(0.0, (total.sum_sq - n * out.estimate * out.estimate) / (n - 1.0)) : 0.0;
  out.se = std::sqrt(var / n);
  for (int t = 0; t < 3; ++t) out.terms[t] = total.terms[t] / n;
  out.tilt = tilt_s;
  out.n_draws = n_draws;
  out.max_weight_share = total.sum > 0.0 ? total.max_f / total.sum : 0.0;
  out.degenerate = out.max_weight_share > kDegenerateShare;
  return out;
}

double balanced_tilt(const DistributionSpec& x_law, double p) {
  // sqrt(p) phi(s) = 1
  return solve_kappa(x_law, std::sqrt(p)).kappa;
}

TwoSampleResult two_sample_compare(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.empty() || b.empty()) throw InsufficientDataError("two_sample_compare: both samples must be non-empty");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  TwoSampleResult r;
  r.statistic = d;
  r.alpha = alpha;
  r.n_a = sa.size();
  r.n_b = sb.size();
  r.critical = std::sqrt(-0.5 * std::log(alpha / 2.0)) * std::sqrt((na + nb) / (na * nb));
  r.passed = d < r.critical;
  return r;
}

}  // namespace rsl
