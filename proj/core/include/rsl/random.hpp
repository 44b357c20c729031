#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace rsl {

// Philox4x32-10 block function (Salmon et al.), exposed for known-answer tests.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

std::uint64_t splitmix64(std::uint64_t x);

// Stream ids are namespaced by the component that consumes them so that
// independent parts of an experiment never share random numbers.
inline constexpr std::uint64_t stream_key(std::uint64_t domain, std::uint64_t index) {
  return (domain << 48) | (index & ((std::uint64_t{1} << 48) - 1));
}

// Deterministically derive a child seed, e.g. for an independent replicate.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

// Counter-based random stream. The pair (seed, stream_id) names an
// independent sequence; the n-th output depends only on (seed, stream_id, n),
// so work can be partitioned over any number of workers without changing
// results. Single owner; cheap to construct.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1); safe to take logs of.
  double uniform_open();
  // Standard exponential (rate 1).
  double exponential();
  double normal();
  // Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  PhiloxKey key_;
  std::uint64_t block_ = 0;
  PhiloxCounter buffer_{};
  int next_ = 4;
};

}  // namespace rsl
