#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "rsl/parallel.hpp"
#include "rsl/random.hpp"

namespace rsl {
namespace {

TEST(Philox, KnownAnswerVectors) {
  EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}),
            (PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RandomStream, SameSeedAndStreamReproduce) {
  RandomStream a(7, 3), b(7, 3);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(RandomStream, StreamsAndSeedsDiffer) {
  RandomStream a(7, 3), b(7, 4), c(8, 3);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    same_ab += x == b();
    same_ac += x == c();
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

TEST(RandomStream, UniformMoments) {
  RandomStream rng(1, 0);
  const int n = 1'000'000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum_sq += u * u;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.5, 3.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sum_sq / n - mean * mean, 1.0 / 12.0, 1e-3);
}

TEST(RandomStream, UniformOpenExcludesZero) {
  RandomStream rng(2, 0);
  for (int i = 0; i < 100'000; ++i) {
    const double u = rng.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RandomStream, ExponentialAndNormalMoments) {
  RandomStream rng(3, 0);
  const int n = 1'000'000;
  double e = 0.0, z = 0.0, z2 = 0.0;
  for (int i = 0; i < n; ++i) {
    e += rng.exponential();
    const double v = rng.normal();
    z += v;
    z2 += v * v;
  }
  EXPECT_NEAR(e / n, 1.0, 3.0 / std::sqrt(n));
  EXPECT_NEAR(z / n, 0.0, 3.0 / std::sqrt(n));
  EXPECT_NEAR(z2 / n, 1.0, 3.0 * std::sqrt(2.0 / n));
}

TEST(RandomStream, BelowIsUniformOnRange) {
  RandomStream rng(4, 0);
  std::vector<int> counts(7, 0);
  const int n = 700'000;
  for (int i = 0; i < n; ++i) {
    const auto k = rng.below(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 4.0 * std::sqrt(n / 7.0));
}

TEST(Seeds, DeriveSeedIsDeterministicAndSpreads) {
  EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 100; ++s) seen.insert(derive_seed(42, s));
  EXPECT_EQ(seen.size(), 100u);
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 1));
}

TEST(Seeds, StreamKeysAreDisjointAcrossDomains) {
  EXPECT_NE(stream_key(1, 5), stream_key(2, 5));
  EXPECT_EQ(stream_key(1, 5) >> 48, 1u);
}

TEST(Parallel, ResultIndependentOfWorkerCount) {
  const std::size_t n_blocks = 37;
  auto run = [&](unsigned workers) {
    std::vector<double> out(n_blocks);
    for_each_block(n_blocks, workers, [&](std::size_t b) {
      RandomStream rng(9, b);
      out[b] = rng.uniform();
    });
    return out;
  };
  EXPECT_EQ(run(1), run(4));
}

TEST(Parallel, FirstExceptionIsRethrown) {
  EXPECT_THROW(for_each_block(10, 3,
                              [](std::size_t b) {
                                if (b == 5) throw std::runtime_error("boom");
                              }),
               std::runtime_error);
}

TEST(Parallel, BlockCount) {
  EXPECT_EQ(block_count(0), 0u);
  EXPECT_EQ(block_count(1), 1u);
  EXPECT_EQ(block_count(kBlockSize), 1u);
  EXPECT_EQ(block_count(kBlockSize + 1), 2u);
}

}  // namespace
}  // namespace rsl
