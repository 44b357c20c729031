#include "rsl/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "rsl/error.hpp"
#include "rsl/parallel.hpp"
#include "rsl/randomwalk.hpp"
#include "rsl/tailstats.hpp"
#include "streams.hpp"

namespace rsl {
namespace {

constexpr double kRootTol = 1e-10;
constexpr std::size_t kBatches = 100;
constexpr double kTopShareLimit = 0.3;

// Mean and batch-means SE over contiguous batches.
Estimate batch_mean(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n == 0) throw InsufficientDataError("batch_mean: no values");
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  Estimate e;
  e.value = total / static_cast<double>(n);
  const std::size_t k = std::min(kBatches, n);
  if (k < 2) return e;
  std::vector<double> means(k);
  for (std::size_t b = 0; b < k; ++b) {
    const std::size_t lo = b * n / k;
    const std::size_t hi = (b + 1) * n / k;
    means[b] = std::accumulate(v.begin() + lo, v.begin() + hi, 0.0) / static_cast<double>(hi - lo);
  }
  const double mu = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(k);
  double ss = 0.0;
  for (double m : means) ss += (m - mu) * (m - mu);
  e.se = std::sqrt(ss / static_cast<double>(k - 1) / static_cast<double>(k));
  return e;
}

// Fills out[i] = fn(rng, values[i]) with one stream per block of the sample.
template <class Fn>
std::vector<double> map_sample(std::span<const double> values, std::uint64_t seed, std::uint64_t domain,
                               unsigned workers, Fn fn) {
  std::vector<double> out(values.size());
  for_each_block(block_count(values.size()), workers, [&](std::size_t b) {
    RandomStream rng(seed, stream_key(domain, b));
    const std::size_t end = std::min(values.size(), (b + 1) * kBlockSize);
    for (std::size_t i = b * kBlockSize; i < end; ++i) out[i] = fn(rng, values[i]);
  });
  return out;
}

std::string format_form(const char* fmt, double a, double b = 0.0) {
  char buf[96];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

void require_sample(const StationarySample& s, const char* what) {
  if (s.values.empty()) throw InsufficientDataError(std::string(what) + ": empty W sample");
}

}  // namespace

const char* to_string(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::Heavy:
      return "Heavy";
    case RegimeTag::Cramer:
      return "Cramer";
    case RegimeTag::Intermediate:
      return "Intermediate";
  }
  return "?";
}

KappaSolution solve_kappa(const DistributionSpec& x_law, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("solve_kappa: p must lie in (0, 1]");
  const double q = right_abscissa(x_law);
  if (!(q > 0.0)) throw NoRootError("solve_kappa: the mgf is infinite for every s > 0 (heavy right tail)");
  auto f = [&](double s) { return p * mgf(x_law, s) - 1.0; };

  double lo = std::isfinite(q) ? 1e-8 * q : 1e-8;
  if (!(f(lo) < 0.0)) {
    throw NoRootError("solve_kappa: p E[exp(sX)] >= 1 near s = 0 (E[X] >= 0 at p = 1)");
  }
  double hi;
  if (std::isfinite(q)) {
    const double eps = 1e-8 * q;
    hi = q - eps;
    if (!(f(hi) > 0.0)) {
      const double at_q = mgf(x_law, q);
      if (std::isfinite(at_q) && p * at_q <= 1.0 + kRootTol) {
        throw NoRootError("solve_kappa: E[exp(sX)] stays below 1/p up to the abscissa s = " + std::to_string(q) +
                          "; the law is not in the Cramer regime");
      }
      double gap = eps;
      for (int i = 0; i < 60 && !(f(hi) > 0.0); ++i) {
        lo = hi;
        gap *= 0.5;
        hi = q - gap;
      }
      if (!(f(hi) > 0.0)) throw NoRootError("solve_kappa: could not bracket the root below the abscissa");
    }
  } else {
    hi = 1.0;
    for (int i = 0; i < 200 && !(f(hi) > 0.0); ++i) {
      lo = hi;
      hi *= 2.0;
    }
    if (!(f(hi) > 0.0)) throw NoRootError("solve_kappa: p E[exp(sX)] never reaches 1");
  }

  std::uintmax_t iters = 200;
  const auto bracket =
      boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  double kappa = 0.5 * (bracket.first + bracket.second);
  // Newton polish in case the bracket midpoint is off by a few ulps of phi.
  for (int i = 0; i < 4 && std::abs(f(kappa)) > kRootTol; ++i) {
    kappa -= f(kappa) / (p * mgf_x_moment(x_law, kappa));
  }
  if (!(std::abs(f(kappa)) <= kRootTol)) {
    throw NoRootError("solve_kappa: residual " + std::to_string(f(kappa)) + " exceeds tolerance");
  }
  if (!(kappa > 0.0 && kappa < q)) throw NoRootError("solve_kappa: root escaped (0, q)");
  if (!(p * mgf(x_law, 0.5 * kappa) < 1.0)) throw Error("solve_kappa: convexity check phi(kappa/2) < 1/p failed");
  return {kappa, mgf_x_moment(x_law, kappa)};
}

Regime classify(const DistributionSpec& x_law, double p) {
  if (!(p >= 0.0 && p < 1.0)) throw DomainError("classify: p must lie in [0, 1)");
  if (x_law.non_negative() || (x_law.is<Difference>() && survival(x_law, 0.0) >= 1.0)) {
    throw StabilityError("classify: P(X < 0) = 0, so W has no stationary law");
  }
  const TailClass tc = tail_class(x_law);
  if (tc.kind == TailClass::Kind::Subexponential) return Regime{RegimeTag::Heavy};
  if (is_lattice(x_law)) throw ValidationError("classify: lattice laws are excluded from the Cramer and S(gamma) theory");

  auto intermediate = [&](double phi_gamma) {
    Regime r{RegimeTag::Intermediate};
    r.gamma = tc.gamma;
    r.phi_gamma = phi_gamma;
    return r;
  };
  if (p == 0.0) {
    if (tc.kind == TailClass::Kind::SGamma) return intermediate(mgf(x_law, tc.gamma));
    throw NoRootError("classify: no finite Cramer root at p = 0 (kappa grows without bound as p -> 0); "
                      "light tails at p = 0 are out of scope");
  }
  try {
    const KappaSolution k = solve_kappa(x_law, p);
    Regime r{RegimeTag::Cramer};
    r.kappa = k.kappa;
    r.m = k.m;
    return r;
  } catch (const NoRootError&) {
    if (tc.kind != TailClass::Kind::SGamma) throw;
    const double phi_gamma = mgf(x_law, tc.gamma);
    if (p * phi_gamma < 1.0) return intermediate(phi_gamma);
    throw RegimeError("classify: p E[exp(gamma X)] = 1 sits on the Cramer / S(gamma) boundary");
  }
}

double heavy_constant(double p) {
  if (p == 1.0) {
    throw DomainError("heavy_constant: the asymptotics of W are discontinuous at p = 1; 1/(1-p) does not apply");
  }
  if (!(p >= 0.0 && p < 1.0)) throw DomainError("heavy_constant: p must lie in [0, 1)");
  return 1.0 / (1.0 - p);
}

CramerConstant cramer_constant(const StationarySample& w_sample, const DistributionSpec& x_law, double p,
                               double kappa, double m, std::uint64_t seed, unsigned workers) {
  require_sample(w_sample, "cramer_constant");
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("cramer_constant: p must lie in (0, 1]");
  if (!(kappa > 0.0 && m > 0.0 && std::isfinite(m))) throw DomainError("cramer_constant: need kappa > 0, 0 < m < inf");
  // Goldie's normaliser E[M^kappa log M] carries the factor p from M = 1{Y=+1} e^X.
  const double mg = p * m;
  const double mk = mg * kappa;

  const auto terms = map_sample(w_sample.values, seed, streams::kCramerRepresentation, workers, [&](RandomStream& rng, double w) {
    const double x = sample(x_law, rng);
    const double up = std::expm1(kappa * std::max(x - w, 0.0)) / kappa;
    const double down = x + w <= 0.0 ? -std::expm1(kappa * (x + w)) : 0.0;
    return (1.0 - p) / mk + (1.0 - p) / mg * up + p / mk * down;
  });
  // (R'^kappa - (MR)^kappa) / (kappa m) with R' = max(1, Q/R, MR) one step on.
  const auto goldie = map_sample(w_sample.values, seed, streams::kCramerGoldie, workers, [&](RandomStream& rng, double w) {
    const double x = sample(x_law, rng);
    if (rng.uniform() < p) return x + w < 0.0 ? -std::expm1(kappa * (x + w)) / mk : 0.0;
    return std::exp(kappa * std::max(x - w, 0.0)) / mk;
  });

  CramerConstant c;
  c.representation = batch_mean(terms);
  c.goldie = batch_mean(goldie);
  c.upper_bound = (1.0 + p) / (p * mk);
  c.n = w_sample.values.size();
  c.effective_n = w_sample.effective_n;

  std::vector<double> sorted = terms;
  const std::size_t top = std::max<std::size_t>(1, sorted.size() / 100);
  std::nth_element(sorted.begin(), sorted.end() - static_cast<std::ptrdiff_t>(top), sorted.end());
  const double top_sum = std::accumulate(sorted.end() - static_cast<std::ptrdiff_t>(top), sorted.end(), 0.0);
  const double total = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  c.top_share = total > 0.0 ? top_sum / total : 0.0;
  c.heavy_integrand = c.top_share > kTopShareLimit;
  return c;
}

ExponentialTailFit fit_exponential_tail(std::span<const double> samples, double kappa, std::size_t effective_n,
                                        std::size_t min_exceedances, std::size_t points) {
  const std::size_t n = samples.size();
  if (points < 3) throw ValidationError("fit_exponential_tail: need at least 3 points");
  if (n <= min_exceedances * 10) throw InsufficientDataError("fit_exponential_tail: sample too small");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double x_lo = sorted[static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(n))) - 1];
  const double x_hi = sorted[n - min_exceedances - 1];
  if (!(x_hi > x_lo)) throw InsufficientDataError("fit_exponential_tail: empty window above the 0.9 quantile");

  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = x_lo + (x_hi - x_lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  const TailCurve curve = empirical_tail(sorted, grid, effective_n);
  std::vector<double> x, y, ph;
  for (std::size_t i = 0; i < points; ++i) {
    if (curve.exceedances[i] < min_exceedances || curve.p_hat[i] >= 1.0) continue;
    x.push_back(grid[i]);
    y.push_back(std::log(curve.p_hat[i]));
    ph.push_back(curve.p_hat[i]);
  }
  if (x.size() < 3) throw InsufficientDataError("fit_exponential_tail: fewer than 3 usable points");
  const auto cov = nested_log_covariance(ph, curve.effective_n);

  const double pinned = -kappa;
  const SlopeFit fixed = gls_line(x, y, cov, &pinned);
  const SlopeFit free = gls_line(x, y, cov);

  ExponentialTailFit fit;
  fit.constant.value = std::exp(fixed.intercept);
  fit.constant.se = fit.constant.value * fixed.intercept_se;
  fit.x_lo = x.front();
  fit.x_hi = x.back();
  fit.points = x.size();
  fit.free_slope = free.slope;
  fit.free_slope_se = free.se;
  fit.residual_slope = free.slope + kappa;
  fit.residual_slope_se = free.se;
  fit.n = n;
  return fit;
}

ExponentialTailFit cramer_lower_bound(double p, const DistributionSpec& x_law, double kappa, std::size_t n_draws,
                                      std::uint64_t seed, unsigned workers) {
  if (p == 0.0) throw DomainError("cramer_lower_bound: T_N = 0 at p = 0, so C_T is undefined");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("cramer_lower_bound: p must lie in (0, 1)");
  const auto tn = sample_walk_column(p, x_law, WalkColumn::TN, n_draws, seed, workers);
  return fit_exponential_tail(tn, kappa);
}

SgsnConstants sgsn_constants(double p, double phi_gamma) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("sgsn_constants: p must lie in [0, 1]");
  if (!(phi_gamma > 0.0)) throw DomainError("sgsn_constants: phi(gamma) must be positive");
  if (!(p * phi_gamma < 1.0)) throw DomainError("sgsn_constants: p phi(gamma) >= 1, the geometric sum diverges");
  const double d = (1.0 - p * phi_gamma) * (1.0 - p * phi_gamma);
  return {(1.0 - p) * p / d, (1.0 - p) / d};
}

double exp_integrated_nonpositive(std::span<const double> z, double gamma) {
  if (z.empty()) throw InsufficientDataError("exp_integrated_nonpositive: no values");
  double s = 0.0;
  for (double v : z) s += -std::expm1(gamma * std::min(v, 0.0));
  return s / static_cast<double>(z.size());
}

IntermediateConstant intermediate_constant(const StationarySample& w_sample, const DistributionSpec& x_law, double p,
                                           double gamma, double phi_gamma, std::uint64_t seed, unsigned workers) {
  require_sample(w_sample, "intermediate_constant");
  if (!(gamma > 0.0)) throw DomainError("intermediate_constant: gamma must be positive");
  const SgsnConstants sg = sgsn_constants(p, phi_gamma);
  const double d = (1.0 - p * phi_gamma) * (1.0 - p * phi_gamma);
  const std::size_t n = w_sample.values.size();

  std::vector<double> minus(n), plus(n), laplace(n);
  {
    const auto& values = w_sample.values;
    for_each_block(block_count(n), workers, [&](std::size_t b) {
      RandomStream rng(seed, stream_key(streams::kIntermediate, b));
      const std::size_t end = std::min(n, (b + 1) * kBlockSize);
      for (std::size_t i = b * kBlockSize; i < end; ++i) {
        const double x = sample(x_law, rng);
        minus[i] = -std::expm1(gamma * std::min(x - values[i], 0.0));
        plus[i] = -std::expm1(gamma * std::min(x + values[i], 0.0));
        laplace[i] = std::exp(-gamma * values[i]);
      }
    });
  }
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = ((1.0 - p) * p * minus[i] + p * p * plus[i] + (1.0 - p) * laplace[i]) / d;
  }

  IntermediateConstant out;
  out.c_gamma = batch_mean(c);
  out.p_minus = batch_mean(minus);
  out.p_plus = batch_mean(plus);
  out.laplace = batch_mean(laplace);
  out.c_n = sg.c_n;
  out.c_k = sg.c_k;
  return out;
}

ContinuityCheck continuity_identity(const StationarySample& w_sample, const DistributionSpec& x_law, double gamma,
                                    std::uint64_t seed, double tolerance_z) {
  require_sample(w_sample, "continuity_identity");
  if (!(gamma > 0.0)) throw DomainError("continuity_identity: gamma must be positive");
  const double phi_gamma = mgf(x_law, gamma);
  if (!(phi_gamma < 1.0)) throw DomainError("continuity_identity: needs E[exp(gamma X)] < 1");
  const auto [first, second] = split_halves(w_sample);

  const auto direct = map_sample(first.values, seed, streams::kIntermediate, 1, [&](RandomStream& rng, double w) {
    return -std::expm1(gamma * std::min(sample(x_law, rng) + w, 0.0));
  });
  std::vector<double> growth(second.values.size());
  std::transform(second.values.begin(), second.values.end(), growth.begin(),
                 [&](double w) { return std::exp(gamma * w) * (1.0 - phi_gamma); });

  ContinuityCheck c;
  c.direct = batch_mean(direct);
  c.laplace = batch_mean(growth);
  c.z = joint_z(c.direct.value, c.direct.se, c.laplace.value, c.laplace.se);
  c.pass = std::abs(c.z) <= tolerance_z;
  return c;
}

AsymptoticPrediction predict(const DistributionSpec& x_law, double p, const StationarySample& w_sample,
                             const PredictOptions& options) {
  AsymptoticPrediction pred;
  pred.regime = classify(x_law, p);
  switch (pred.regime.tag) {
    case RegimeTag::Heavy:
      pred.constant = heavy_constant(p);
      pred.form = format_form("%.6f * P(X>x)", pred.constant);
      break;
    case RegimeTag::Cramer: {
      const Regime& r = pred.regime;
      const CramerConstant c = cramer_constant(w_sample, x_law, p, r.kappa, r.m, options.seed, options.workers);
      pred.constant = c.representation.value;
      pred.constant_se = c.representation.se;
      ConstantBounds bounds;
      bounds.upper = c.upper_bound;
      if (options.walk_draws > 0) {
        try {
          const auto fit = cramer_lower_bound(p, x_law, r.kappa, options.walk_draws,
                                              derive_seed(options.seed, streams::kWalk), options.workers);
          bounds.lower = fit.constant;
        } catch (const InsufficientDataError&) {
        }
      }
      pred.bounds = bounds;
      pred.form = format_form("%.6f * exp(-%.6f * x)", pred.constant, r.kappa);
      break;
    }
    case RegimeTag::Intermediate: {
      const Regime& r = pred.regime;
      const IntermediateConstant c =
          intermediate_constant(w_sample, x_law, p, r.gamma, r.phi_gamma, options.seed, options.workers);
      pred.constant = c.c_gamma.value;
      pred.constant_se = c.c_gamma.se;
      pred.form = format_form("%.6f * P(X>x)", pred.constant);
      break;
    }
  }
  return pred;
}

double predicted_tail(const AsymptoticPrediction& prediction, const DistributionSpec& x_law, double x) {
  if (prediction.regime.tag == RegimeTag::Cramer) return prediction.constant * std::exp(-prediction.regime.kappa * x);
  return prediction.constant * survival(x_law, x);
}

std::pair<StationarySample, StationarySample> split_halves(const StationarySample& sample) {
  const std::size_t n = sample.values.size();
  const std::size_t blocks = block_count(n);
  if (blocks < 2) throw InsufficientDataError("split_halves: need at least two blocks of draws");
  const std::size_t cut = (blocks / 2) * kBlockSize;
  auto half = [&](std::size_t lo, std::size_t hi) {
    StationarySample s;
    s.values.assign(sample.values.begin() + static_cast<std::ptrdiff_t>(lo),
                    sample.values.begin() + static_cast<std::ptrdiff_t>(hi));
    s.n_cycles = static_cast<std::size_t>(std::llround(static_cast<double>(sample.n_cycles) *
                                                       static_cast<double>(hi - lo) / static_cast<double>(n)));
    s.effective_n = effective_sample_size(s.values);
    s.meta = sample.meta;
    return s;
  };
  return {half(0, cut), half(cut, n)};
}

IdentityReport verify_representation(const StationarySample& w_sample, const DistributionSpec& x_law, double p,
                                     std::span<const double> grid, std::size_t n_draws, std::uint64_t seed,
                                     unsigned workers) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("verify_representation: p must lie in (0, 1)");
  if (n_draws < 2) throw ValidationError("verify_representation: n_draws must be >= 2");
  const auto [lhs_half, pool_half] = split_halves(w_sample);
  const TailCurve lhs = empirical_tail(lhs_half, grid);
  const auto& pool = pool_half.values;
  const double c = p / (1.0 - p);
  const std::size_t g = grid.size();

  struct Acc {
    std::vector<double> sum, sum_sq;
  };
  const std::size_t n_blocks = block_count(n_draws);
  std::vector<Acc> acc(n_blocks);
  for_each_block(n_blocks, workers, [&](std::size_t b) {
    RandomStream rng(seed, stream_key(streams::kRepresentation, b));
    Acc a{std::vector<double>(g, 0.0), std::vector<double>(g, 0.0)};
    const std::size_t end = std::min(n_draws, (b + 1) * kBlockSize);
    for (std::size_t i = b * kBlockSize; i < end; ++i) {
      const GeometricHorizon h = sample_horizon(p, rng);
      double s = 0.0;
      for (std::uint64_t j = 0; j < h.n; ++j) s += sample(x_law, rng);
      const double xv = sample(x_law, rng);
      const double w = pool[rng.below(pool.size())];
      for (std::size_t k = 0; k < g; ++k) {
        const double x = grid[k];
        double f = 0.0;
        if (s > x) {
          f = 1.0 + (xv + w + s <= x ? c : 0.0);
        } else if (xv - w + s > x) {
          f = 1.0;
        }
        a.sum[k] += f;
        a.sum_sq[k] += f * f;
      }
    }
    acc[b] = std::move(a);
  });

  IdentityReport report;
  report.name = "P(W > x) = killed-walk representation";
  const double n = static_cast<double>(n_draws);
  for (std::size_t k = 0; k < g; ++k) {
    double sum = 0.0, sum_sq = 0.0;
    for (const Acc& a : acc) {
      sum += a.sum[k];
      sum_sq += a.sum_sq[k];
    }
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    PointCheck pt;
    pt.x = grid[k];
    pt.lhs = lhs.p_hat[k];
    pt.lhs_se = lhs.se[k];
    pt.rhs = mean;
    pt.rhs_se = std::sqrt(var / n);
    report.points.push_back(pt);
  }
  finalize(report);
  return report;
}

}  // namespace rsl
