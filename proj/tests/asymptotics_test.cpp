#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "rsl/asymptotics.hpp"
#include "rsl/error.hpp"
#include "rsl/parallel.hpp"
#include "rsl/tailstats.hpp"

namespace rsl {
namespace {

using D = DistributionSpec;

D mm1() { return D::difference(D::exponential(2.0), D::exponential(1.0)); }
D heavy_law() { return D::difference(D::pareto(2.0, 1.0), D::exponential(1.0)); }
D sgamma_law() { return D::difference(D::tilted_pareto(1.0, 2.0, 1.0), D::exponential(1.0)); }

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

TEST(SolveKappa, ExponentialDifference) {
  const auto half = solve_kappa(mm1(), 0.5);
  EXPECT_NEAR(half.kappa, kGolden, 1e-10);
  // phi(s) = 2 / g(s), g = (2 - s)(1 + s); phi'(kappa) = -2 g'(kappa) / g(kappa)^2 with g(kappa) = 1.
  EXPECT_NEAR(half.m, 2.0 * std::sqrt(5.0), 1e-8);
  EXPECT_NEAR(0.5 * mgf(mm1(), half.kappa), 1.0, 1e-10);
  EXPECT_LT(0.5 * mgf(mm1(), half.kappa / 2.0), 1.0);

  const auto one = solve_kappa(mm1(), 1.0);
  EXPECT_NEAR(one.kappa, 1.0, 1e-10);
  EXPECT_NEAR(one.m, 0.5, 1e-8);
}

TEST(SolveKappa, NoRoot) {
  // phi(1) = 2 * 1/2 = 1 < 1/p at the abscissa.
  EXPECT_NEAR(mgf(sgamma_law(), 1.0), 1.0, 1e-12);
  EXPECT_THROW(solve_kappa(sgamma_law(), 0.5), NoRootError);
  EXPECT_THROW(solve_kappa(heavy_law(), 0.5), NoRootError);
  EXPECT_THROW(solve_kappa(mm1(), 0.0), DomainError);
}

TEST(Classify, Examples) {
  for (double p : {0.0, 0.5, 0.75, 0.99}) EXPECT_EQ(classify(heavy_law(), p).tag, RegimeTag::Heavy);
  const Regime c = classify(mm1(), 0.5);
  EXPECT_EQ(c.tag, RegimeTag::Cramer);
  EXPECT_NEAR(c.kappa, kGolden, 1e-10);
  const Regime i = classify(sgamma_law(), 0.5);
  EXPECT_EQ(i.tag, RegimeTag::Intermediate);
  EXPECT_EQ(i.gamma, 1.0);
  EXPECT_NEAR(i.phi_gamma, 1.0, 1e-12);
  EXPECT_EQ(classify(sgamma_law(), 0.0).tag, RegimeTag::Intermediate);
}

TEST(Classify, CramerWinsWhenARootExists) {
  // phi(1) = 2 * 3/4 = 1.5 >= 1/p at p = 0.9, so the root lies below gamma.
  const D law = D::difference(D::tilted_pareto(1.0, 2.0, 1.0), D::exponential(3.0));
  const Regime r = classify(law, 0.9);
  EXPECT_EQ(r.tag, RegimeTag::Cramer);
  EXPECT_GT(r.kappa, 0.0);
  EXPECT_LT(r.kappa, 1.0);
  EXPECT_EQ(classify(law, 0.5).tag, RegimeTag::Intermediate);
}

TEST(Classify, Rejections) {
  EXPECT_THROW(classify(mm1(), 0.0), NoRootError);
  EXPECT_THROW(classify(mm1(), 1.0), DomainError);
  EXPECT_THROW(classify(D::difference(D::deterministic(1.0), D::deterministic(2.0)), 0.5), ValidationError);
  EXPECT_THROW(classify(D::exponential(1.0), 0.5), StabilityError);
}

TEST(HeavyConstant, Values) {
  EXPECT_EQ(heavy_constant(0.0), 1.0);
  EXPECT_EQ(heavy_constant(0.5), 2.0);
  EXPECT_EQ(heavy_constant(0.75), 4.0);
  EXPECT_THROW(heavy_constant(1.0), DomainError);
  EXPECT_GT(heavy_constant(0.999), 999.0);
  double prev = 0.0;
  for (double p = 0.0; p < 0.99; p += 0.01) {
    EXPECT_GT(heavy_constant(p), prev);
    prev = heavy_constant(p);
  }
}

TEST(SgsnConstants, Examples) {
  const auto zero = sgsn_constants(0.0, 1.3);
  EXPECT_EQ(zero.c_n, 0.0);
  EXPECT_EQ(zero.c_k, 1.0);
  const auto half = sgsn_constants(0.5, 1.2);
  EXPECT_NEAR(half.c_n, 1.5625, 1e-14);
  EXPECT_NEAR(half.c_k, 3.125, 1e-14);
  EXPECT_NEAR(half.c_k, half.c_n / 0.5, 1e-14);
  EXPECT_THROW(sgsn_constants(0.5, 2.0), DomainError);
}

TEST(SgsnConstants, MatchSeriesOracle) {
  RandomStream rng(17, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const double p = 0.02 + 0.96 * rng.uniform();
    const double t = (0.95 / p) * (0.05 + 0.95 * rng.uniform());
    // E[N t^{N-1}] and E[K t^{K-1}] summed term by term.
    double c_n = 0.0, c_k = 0.0;
    double pk = 1.0 - p;  // (1 - p) p^k
    double tk = 1.0;      // t^k
    for (int k = 0; k < 100'000; ++k) {
      const double term_k = (k + 1) * tk * pk;
      if (k > 0) c_n += k * (tk / t) * pk;
      c_k += term_k;
      if (term_k < 1e-17 * c_k && k > 10) break;
      pk *= p;
      tk *= t;
    }
    const auto c = sgsn_constants(p, t);
    EXPECT_NEAR(c.c_n, c_n, 1e-10 * c_n) << "p=" << p << " t=" << t;
    EXPECT_NEAR(c.c_k, c_k, 1e-10 * c_k) << "p=" << p << " t=" << t;
  }
}

TEST(ExpIntegration, MatchesSampledExponential) {
  RandomStream rng(19, 0);
  const double gamma = 1.5;
  const int n = 200'000;
  std::vector<double> z(n);
  for (auto& v : z) v = rng.normal();
  const double analytic = exp_integrated_nonpositive(z, gamma);
  double hits = 0.0;
  for (double v : z) hits += v + rng.exponential() / gamma <= 0.0;
  const double sampled = hits / n;
  // The analytic average conditions on z, so its variance is below the sampled one.
  const double se = std::sqrt(2.0 * sampled * (1.0 - sampled) / n);
  EXPECT_NEAR(analytic, sampled, 3.0 * se);
  const std::vector<double> positive{0.5, 2.0};
  EXPECT_EQ(exp_integrated_nonpositive(positive, gamma), 0.0);
}

class SampledTest : public ::testing::Test {
 protected:
  static StationarySample draw(double p, const D& law, std::size_t n, std::uint64_t seed) {
    return stationary_sample(RecursionConfig{p, law, seed}, n);
  }
};

TEST_F(SampledTest, CramerConstantEstimatorsAgree) {
  const auto s = draw(0.5, mm1(), 1'000'000, 41);
  const auto k = solve_kappa(mm1(), 0.5);
  const auto c = cramer_constant(s, mm1(), 0.5, k.kappa, k.m, 42);
  EXPECT_LE(std::abs(joint_z(c.representation.value, c.representation.se, c.goldie.value, c.goldie.se)), 3.0);
  EXPECT_NEAR(c.upper_bound, 1.5 / (0.5 * 0.5 * k.m * k.kappa), 1e-12);
  EXPECT_LE(c.representation.value, c.upper_bound + 3.0 * c.representation.se);
  EXPECT_GT(c.representation.value, 0.0);
  EXPECT_EQ(c.n, s.values.size());
  EXPECT_GE(c.top_share, 0.01);
  EXPECT_LE(c.top_share, 1.0);

  const auto lower = cramer_lower_bound(0.5, mm1(), k.kappa, 1'000'000, 43);
  EXPECT_LE(lower.constant.value,
            c.representation.value + 3.0 * std::hypot(lower.constant.se, c.representation.se));
  EXPECT_NEAR(lower.free_slope, -k.kappa, 0.05 * k.kappa);
  EXPECT_THROW(cramer_lower_bound(0.0, mm1(), k.kappa, 1000, 1), DomainError);
}

TEST_F(SampledTest, CramerConstantIsDeterministic) {
  const auto s = draw(0.5, mm1(), 100'000, 44);
  const auto k = solve_kappa(mm1(), 0.5);
  const auto a = cramer_constant(s, mm1(), 0.5, k.kappa, k.m, 1, 1);
  const auto b = cramer_constant(s, mm1(), 0.5, k.kappa, k.m, 1, 4);
  EXPECT_EQ(a.representation.value, b.representation.value);
  EXPECT_EQ(a.goldie.se, b.goldie.se);
}

TEST_F(SampledTest, IntermediateConstantAtPZeroIsLaplaceMean) {
  const auto s = draw(0.0, sgamma_law(), 200'000, 45);
  const auto c = intermediate_constant(s, sgamma_law(), 0.0, 1.0, mgf(sgamma_law(), 1.0), 46);
  double direct = 0.0;
  for (double w : s.values) direct += std::exp(-w);
  direct /= static_cast<double>(s.values.size());
  EXPECT_EQ(c.c_gamma.value, c.laplace.value);
  EXPECT_NEAR(c.c_gamma.value, direct, 1e-12);
  EXPECT_EQ(c.c_n, 0.0);
  EXPECT_EQ(c.c_k, 1.0);
}

TEST_F(SampledTest, IntermediateConstantCombinesTerms) {
  const double p = 0.5;
  const double phi = mgf(sgamma_law(), 1.0);
  const auto s = draw(p, sgamma_law(), 200'000, 47);
  const auto c = intermediate_constant(s, sgamma_law(), p, 1.0, phi, 48);
  const double d = (1.0 - p * phi) * (1.0 - p * phi);
  const double combined =
      c.c_n * (c.p_minus.value + p / (1.0 - p) * c.p_plus.value) + (1.0 - p) / d * c.laplace.value;
  EXPECT_NEAR(c.c_gamma.value, combined, 1e-12 * combined);
}

TEST_F(SampledTest, ContinuityIdentityAtPOne) {
  const D law = D::difference(D::tilted_pareto(1.0, 6.0, 1.0), D::exponential(0.5));
  const auto s = draw(1.0, law, 1'000'000, 49);
  const auto c = continuity_identity(s, law, 1.0, 50);
  EXPECT_TRUE(c.pass) << "z=" << c.z;
  EXPECT_THROW(continuity_identity(s, sgamma_law(), 1.0, 50), DomainError);
}

TEST_F(SampledTest, RepresentationHoldsForCramerAndIntermediateLaws) {
  const std::vector<double> grid{0.5, 1.0, 2.0};
  for (const D& law : {mm1(), sgamma_law()}) {
    const auto s = draw(0.5, law, 1'000'000, 51);
    const auto r = verify_representation(s, law, 0.5, grid, 1'000'000, 52);
    EXPECT_TRUE(r.passed) << describe(law) << " max|z|=" << r.max_abs_z;
  }
}

TEST_F(SampledTest, RepresentationFarTailVanishes) {
  const auto s = draw(0.5, mm1(), 100'000, 53);
  const std::vector<double> grid{200.0};
  const auto r = verify_representation(s, mm1(), 0.5, grid, 10'000, 54);
  EXPECT_EQ(r.points[0].lhs, 0.0);
  EXPECT_EQ(r.points[0].rhs, 0.0);
  EXPECT_TRUE(r.passed);
}

TEST_F(SampledTest, SplitHalvesAtBlockBoundary) {
  const auto s = draw(0.5, mm1(), 100'000, 55);
  const auto [a, b] = split_halves(s);
  EXPECT_EQ(a.values.size() % kBlockSize, 0u);
  EXPECT_EQ(a.values.size() + b.values.size(), s.values.size());
  EXPECT_EQ(a.values.front(), s.values.front());
  EXPECT_EQ(b.values.back(), s.values.back());
  EXPECT_THROW(split_halves(draw(0.5, mm1(), 1000, 55)), InsufficientDataError);
}

TEST_F(SampledTest, PredictDispatch) {
  const auto heavy = predict(heavy_law(), 0.5, draw(0.5, heavy_law(), 50'000, 56));
  EXPECT_EQ(heavy.regime.tag, RegimeTag::Heavy);
  EXPECT_EQ(heavy.constant, 2.0);
  EXPECT_EQ(heavy.form, "2.000000 * P(X>x)");
  EXPECT_NEAR(predicted_tail(heavy, heavy_law(), 3.0), 2.0 * survival(heavy_law(), 3.0), 1e-15);

  PredictOptions options;
  options.walk_draws = 200'000;
  options.seed = 7;
  const auto cramer = predict(mm1(), 0.5, draw(0.5, mm1(), 200'000, 57), options);
  EXPECT_EQ(cramer.regime.tag, RegimeTag::Cramer);
  ASSERT_TRUE(cramer.bounds.has_value());
  EXPECT_TRUE(cramer.bounds->lower.has_value());
  EXPECT_NE(cramer.form.find("exp(-1.618034 * x)"), std::string::npos);
  EXPECT_NEAR(predicted_tail(cramer, mm1(), 2.0), cramer.constant * std::exp(-kGolden * 2.0), 1e-9);

  const auto s0 = draw(0.0, sgamma_law(), 50'000, 58);
  const auto inter = predict(sgamma_law(), 0.0, s0);
  EXPECT_EQ(inter.regime.tag, RegimeTag::Intermediate);
  double laplace = 0.0;
  for (double w : s0.values) laplace += std::exp(-w);
  EXPECT_NEAR(inter.constant, laplace / static_cast<double>(s0.values.size()), 1e-12);
}

}  // namespace
}  // namespace rsl
