#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "rsl/error.hpp"
#include "rsl/recursion.hpp"
#include "rsl/tailstats.hpp"

namespace rsl {
namespace {

using D = DistributionSpec;

D mm1() { return D::difference(D::exponential(2.0), D::exponential(1.0)); }

TEST(Step, Examples) {
  EXPECT_EQ(step(3.0, -5.0, Sign::Plus), 0.0);
  EXPECT_EQ(step(2.0, 5.0, Sign::Minus), 3.0);
  for (double x : {-2.0, 0.0, 1.5}) {
    EXPECT_EQ(step(0.0, x, Sign::Plus), std::max(0.0, x));
    EXPECT_EQ(step(0.0, x, Sign::Minus), std::max(0.0, x));
  }
}

TEST(Step, MonotoneInIncrement) {
  for (double w : {0.0, 0.5, 3.0}) {
    for (Sign y : {Sign::Plus, Sign::Minus}) {
      double prev = 0.0;
      for (double x = -5.0; x <= 5.0; x += 0.25) {
        const double v = step(w, x, y);
        EXPECT_GE(v, prev);
        prev = v;
      }
    }
  }
}

TEST(GoldieStep, Examples) {
  EXPECT_NEAR(goldie_step({std::exp(2.0), 0.0, std::exp(5.0)}), std::exp(3.0), 1e-12 * std::exp(3.0));
  for (double x : {-1.0, 0.0, 2.0}) {
    EXPECT_DOUBLE_EQ(goldie_step({1.0, std::exp(x), std::exp(x)}), std::max(1.0, std::exp(x)));
  }
  const double q = 0.3, r = 4.0;
  EXPECT_DOUBLE_EQ(goldie_step({r, q, q}), std::max(1.0, q * r));
}

TEST(GoldieStep, ExponentialConjugacy) {
  RandomStream rng(11, 0);
  for (int i = 0; i < 100'000; ++i) {
    const double w = 6.0 * rng.uniform();
    const double x = 12.0 * rng.uniform() - 6.0;
    const Sign y = rng.uniform() < 0.5 ? Sign::Plus : Sign::Minus;
    const double q = std::exp(x);
    const GoldieState s{std::exp(w), y == Sign::Plus ? q : 0.0, q};
    const double expected = std::exp(step(w, x, y));
    ASSERT_NEAR(goldie_step(s), expected, 1e-12 * expected) << "w=" << w << " x=" << x;
    ASSERT_GE(goldie_step(s), 1.0);
  }
}

TEST(SimulatePath, LindleyDrainsUnderNegativeDrift) {
  const RecursionConfig c{1.0, D::difference(D::deterministic(1.0), D::deterministic(2.0)), 3};
  const auto path = simulate_path(c, 8, 5.0);
  ASSERT_EQ(path.size(), 9u);
  const std::vector<double> expected{5, 4, 3, 2, 1, 0, 0, 0, 0};
  for (std::size_t i = 0; i < path.size(); ++i) EXPECT_EQ(path[i], expected[i]);
}

TEST(SimulatePath, AlternatingServiceAtPZero) {
  // W <- (X - W)^+ with X = 2: 0.5, 1.5, 0.5, 1.5, ...
  const RecursionConfig c{0.0, D::difference(D::deterministic(3.0), D::deterministic(1.0)), 3};
  const auto path = simulate_path(c, 6, 0.5);
  for (std::size_t i = 0; i < path.size(); ++i) EXPECT_EQ(path[i], i % 2 == 0 ? 0.5 : 1.5);
}

TEST(SimulatePath, DeterministicAndNonNegative) {
  const RecursionConfig c{0.5, mm1(), 99};
  const auto a = simulate_path(c, 10'000, 1.0);
  const auto b = simulate_path(c, 10'000, 1.0);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.front(), 1.0);
  for (double w : a) {
    ASSERT_GE(w, 0.0);
    ASSERT_GE(std::exp(w), 1.0);
  }
  EXPECT_NE(a, simulate_path(RecursionConfig{0.5, mm1(), 100}, 10'000, 1.0));
}

TEST(SimulatePath, RejectsBadInput) {
  const RecursionConfig c{0.5, mm1(), 1};
  EXPECT_THROW(simulate_path(c, 0, 0.0), ValidationError);
  EXPECT_THROW(simulate_path(c, 5, -1.0), ValidationError);
  EXPECT_THROW(simulate_path(RecursionConfig{1.5, mm1(), 1}, 5, 0.0), ValidationError);
}

TEST(Stability, Checks) {
  EXPECT_THROW(check_stability(RecursionConfig{0.5, D::exponential(1.0), 1}), StabilityError);
  EXPECT_THROW(check_stability(RecursionConfig{1.0, D::difference(D::exponential(1.0), D::exponential(2.0)), 1}),
               StabilityError);
  EXPECT_NO_THROW(check_stability(RecursionConfig{1.0, mm1(), 1}));
  // P(X < 0) > 0 is all that p < 1 needs, even with positive drift.
  EXPECT_NO_THROW(check_stability(RecursionConfig{0.5, D::difference(D::exponential(1.0), D::exponential(2.0)), 1}));
  EXPECT_THROW(stationary_sample(RecursionConfig{0.5, D::uniform(0.0, 1.0), 1}, 100), StabilityError);
  EXPECT_THROW(validate(RecursionConfig{-0.1, mm1(), 1}), ValidationError);
  EXPECT_THROW(validate(RecursionConfig{0.5, mm1(), 1, BurnInThin{10, 0}}), ValidationError);
  EXPECT_NEAR(negative_fraction(mm1(), 3, 100'000), 2.0 / 3.0, 0.01);
}

TEST(StationarySample, MM1WaitingTime) {
  // p = 1: P(W > x) = (lambda/mu) e^{-(mu - lambda) x} = 0.5 e^{-x}.
  const RecursionConfig c{1.0, mm1(), 2024};
  const auto s = stationary_sample(c, 1'000'000);
  ASSERT_EQ(s.values.size(), 1'000'000u);
  const std::vector<double> grid{0.5, 1.0, 2.0, 4.0};
  const TailCurve curve = empirical_tail(s.values, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p = 0.5 * std::exp(-grid[i]);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(s.values.size()));
    EXPECT_NEAR(curve.p_hat[i], p, 3.0 * se) << "x=" << grid[i];
  }
}

TEST(StationarySample, HalvesAgreeAtPZero) {
  const RecursionConfig c{0.0, D::difference(D::deterministic(1.0), D::exponential(1.0)), 5};
  const auto s = stationary_sample(c, 400'000);
  const std::size_t half = s.values.size() / 2;
  auto stats = [](std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double var = ss / static_cast<double>(v.size() - 1);
    const double ess = static_cast<double>(effective_sample_size(v));
    return std::pair{m, std::sqrt(var / ess)};
  };
  const std::span<const double> all(s.values);
  const auto [m1, se1] = stats(all.first(half));
  const auto [m2, se2] = stats(all.subspan(half));
  EXPECT_LE(std::abs(m1 - m2), 3.0 * std::hypot(se1, se2));
}

TEST(StationarySample, AtomAtZeroAndMetadata) {
  const RecursionConfig c{0.5, mm1(), 8};
  const auto s = stationary_sample(c, 200'000);
  const auto zeros = std::count(s.values.begin(), s.values.end(), 0.0);
  EXPECT_GT(zeros, 0);
  EXPECT_GT(s.n_cycles, 0u);
  EXPECT_GE(s.effective_n, 1u);
  EXPECT_LE(s.effective_n, s.values.size());
  for (double w : s.values) ASSERT_GE(w, 0.0);
  EXPECT_EQ(s.meta.seed, 8u);
  EXPECT_EQ(s.meta.p, 0.5);
  EXPECT_EQ(s.meta.law_digest, digest(mm1()));
}

TEST(StationarySample, WorkerCountDoesNotChangeOutput) {
  const RecursionConfig c{0.5, mm1(), 77};
  const auto a = stationary_sample(c, 100'000, 1);
  const auto b = stationary_sample(c, 100'000, 4);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.n_cycles, b.n_cycles);
  EXPECT_EQ(a.effective_n, b.effective_n);
}

TEST(StationarySample, IndependentSeedsPassKS) {
  const auto a = stationary_sample(RecursionConfig{0.5, mm1(), 1}, 100'000);
  const auto b = stationary_sample(RecursionConfig{0.5, mm1(), 2}, 100'000);
  EXPECT_TRUE(two_sample_compare(a.values, b.values).passed);
}

TEST(StationarySample, InitialStateIsForgotten) {
  RecursionConfig c{0.5, mm1(), 31};
  const auto a = stationary_sample(c, 100'000);
  c.w0 = 50.0;
  c.seed = 32;
  const auto b = stationary_sample(c, 100'000);
  EXPECT_TRUE(two_sample_compare(a.values, b.values).passed);
  c.policy = BurnInThin{};
  const auto d = stationary_sample(c, 100'000);
  EXPECT_TRUE(two_sample_compare(a.values, d.values).passed);
}

TEST(StationarySample, RegenerativeCycleFloor) {
  RecursionConfig c{0.5, mm1(), 4, Regenerative{1'000'000'000, 1}};
  EXPECT_THROW(stationary_sample(c, 1000), InsufficientDataError);
  EXPECT_THROW(stationary_sample(c, 0), ValidationError);
}

TEST(EffectiveSampleSize, IndependentAndCorrelated) {
  RandomStream rng(3, 0);
  std::vector<double> iid(100'000);
  for (auto& v : iid) v = rng.exponential();
  EXPECT_GT(effective_sample_size(iid), 50'000u);
  // Runs of 100 identical values: about 1000 independent draws.
  std::vector<double> sticky(100'000);
  for (std::size_t i = 0; i < sticky.size(); ++i) sticky[i] = iid[i / 100];
  EXPECT_LT(effective_sample_size(sticky), 5'000u);
  EXPECT_EQ(effective_sample_size(std::span<const double>(iid).first(50)), 50u);
}

TEST(Policy, Describe) {
  EXPECT_EQ(describe(SamplingPolicy{Regenerative{}}), "regenerative(min_cycles=10000,spacing=10)");
  EXPECT_EQ(describe(SamplingPolicy{BurnInThin{}}), "burn_in_thin(burn_in=10000,thin=10)");
}

}  // namespace
}  // namespace rsl
