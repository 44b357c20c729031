#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "rsl/distributions.hpp"
#include "rsl/recursion.hpp"
#include "rsl/report.hpp"

namespace rsl {

enum class RegimeTag { Heavy, Cramer, Intermediate };

const char* to_string(RegimeTag tag);

struct Regime {
  RegimeTag tag;
  double kappa = 0.0;      // Cramer: root of p E[exp(kappa X)] = 1
  double m = 0.0;          // Cramer: E[X exp(kappa X)]
  double gamma = 0.0;      // Intermediate: exponential rate of the S(gamma) tail
  double phi_gamma = 0.0;  // Intermediate: E[exp(gamma X)] < 1/p
};

struct KappaSolution {
  double kappa;
  double m;
};

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

// Heavy for subexponential right tails; Cramer when p E[exp(kX)] = 1 has a
// root (this wins over S(gamma)); Intermediate for S(gamma) tails with
// E[exp(gamma X)] < 1/p. Rejects lattice laws, p outside [0, 1), and light
// tails at p = 0 (no finite root).
Regime classify(const DistributionSpec& x_law, double p);

// Bracketed root of p phi(s) = 1 on (0, q). Throws NoRootError when phi stays
// below 1/p on the finiteness region.
KappaSolution solve_kappa(const DistributionSpec& x_law, double p);

// 1 / (1 - p); DomainError at p = 1 where the heavy-tail asymptotics jump.
double heavy_constant(double p);

struct CramerConstant {
  Estimate representation;  // three-term representation
  Estimate goldie;       // coupled one-step estimate of the Goldie integral
  double upper_bound = 0.0;  // (1 + p) / (p m_G kappa), m_G = p m
  std::size_t n = 0;
  std::size_t effective_n = 0;
  // Share of the representation-form mass carried by the top 1% of draws.
  double top_share = 0.0;
  bool heavy_integrand = false;
};

// Monte Carlo estimates of the Cramer prefactor C over a stationary sample.
// The normaliser is m_G = E[M^kappa log M] = p m with m = E[X exp(kappa X)].
// Each W is paired with an independent X (and sign, for the Goldie form).
// SEs are batch means over 100 batches.
CramerConstant cramer_constant(const StationarySample& w_sample, const DistributionSpec& x_law, double p,
                               double kappa, double m, std::uint64_t seed, unsigned workers = 1);

// Exponential tail fit P(V > x) ~ C exp(-kappa x) over the window from the
// empirical 0.9 quantile up to the last point with >= 100 exceedances.
struct ExponentialTailFit {
  Estimate constant;  // exp(intercept) with the slope pinned at -kappa
  double x_lo = 0.0;
  double x_hi = 0.0;
  std::size_t points = 0;
  double free_slope = 0.0;  // slope with the slope left free
  double free_slope_se = 0.0;
  // Slope of log(P(V > x) e^{kappa x}), should vanish if the fit is flat.
  double residual_slope = 0.0;
  double residual_slope_se = 0.0;
  std::size_t n = 0;
};

ExponentialTailFit fit_exponential_tail(std::span<const double> samples, double kappa, std::size_t effective_n = 0,
                                        std::size_t min_exceedances = 100, std::size_t points = 16);

// C_T from P(T_N > x) ~ C_T exp(-kappa x).
ExponentialTailFit cramer_lower_bound(double p, const DistributionSpec& x_law, double kappa, std::size_t n_draws,
                                      std::uint64_t seed, unsigned workers = 1);

struct SgsnConstants {
  double c_n;  // P(S_N > x) / P(X > x)
  double c_k;  // P(S_K > x) / P(X > x)
};

SgsnConstants sgsn_constants(double p, double phi_gamma);

struct IntermediateConstant {
  Estimate c_gamma;
  Estimate p_minus;  // P(X - W + E_gamma <= 0)
  Estimate p_plus;   // P(X + W + E_gamma <= 0)
  Estimate laplace;  // E[exp(-gamma W)]
  double c_n = 0.0;
  double c_k = 0.0;
};

// The E_gamma integral is done in closed form per draw:
// P(Z + E_gamma <= 0 | Z) = 1 - exp(gamma min(Z, 0)). Valid for p in [0, 1]
// with p phi(gamma) < 1.
IntermediateConstant intermediate_constant(const StationarySample& w_sample, const DistributionSpec& x_law, double p,
                                           double gamma, double phi_gamma, std::uint64_t seed, unsigned workers = 1);

// Mean of 1 - exp(gamma min(z, 0)) over the given values.
double exp_integrated_nonpositive(std::span<const double> z, double gamma);

struct ContinuityCheck {
  Estimate direct;     // P(X + W + E_gamma <= 0), first half of the sample
  Estimate laplace;    // E[exp(gamma W)] (1 - phi(gamma)), second half
  double z = 0.0;
  bool pass = false;
};

// p = 1 identity P(X + W + E_gamma <= 0) = E[exp(gamma W)] (1 - phi(gamma)).
ContinuityCheck continuity_identity(const StationarySample& w_sample, const DistributionSpec& x_law, double gamma,
                                    std::uint64_t seed, double tolerance_z = kDefaultZ);

struct ConstantBounds {
  std::optional<Estimate> lower;  // C_T
  double upper = 0.0;
};

struct AsymptoticPrediction {
  Regime regime;
  double constant = 0.0;
  double constant_se = 0.0;
  std::optional<ConstantBounds> bounds;
  std::string form;
};

struct PredictOptions {
  std::uint64_t seed = 0;
  unsigned workers = 1;
  // Walk draws for the C_T lower bound; 0 skips it.
  std::size_t walk_draws = 1'000'000;
};

AsymptoticPrediction predict(const DistributionSpec& x_law, double p, const StationarySample& w_sample,
                             const PredictOptions& options = {});

// The predicted P(W > x): C P(X > x) or C exp(-kappa x).
double predicted_tail(const AsymptoticPrediction& prediction, const DistributionSpec& x_law, double x);

// Three-term representation of P(W > x) through the killed walk S_N, with
// the LHS estimated on the first half of w_sample and the RHS drawing W from
// the (independent) second half. n_draws joint draws of (X, W, S_N).
IdentityReport verify_representation(const StationarySample& w_sample, const DistributionSpec& x_law, double p,
                                     std::span<const double> grid, std::size_t n_draws, std::uint64_t seed,
                                     unsigned workers = 1);

// Splits a sample at a block boundary near the middle; the halves come from
// disjoint independent chains.
std::pair<StationarySample, StationarySample> split_halves(const StationarySample& sample);

}  // namespace rsl
