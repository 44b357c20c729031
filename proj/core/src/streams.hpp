#pragma once

#include <cstdint>

namespace rsl::streams {

// Domains for rsl::stream_key.
inline constexpr std::uint64_t kPath = 1;
inline constexpr std::uint64_t kStationary = 2;
inline constexpr std::uint64_t kStability = 3;
inline constexpr std::uint64_t kWalk = 4;
inline constexpr std::uint64_t kSupWalk = 5;
inline constexpr std::uint64_t kCramerRepresentation = 6;
inline constexpr std::uint64_t kCramerGoldie = 7;
inline constexpr std::uint64_t kIntermediate = 8;
inline constexpr std::uint64_t kRepresentation = 9;
inline constexpr std::uint64_t kImportance = 10;
inline constexpr std::uint64_t kBounds = 11;

}  // namespace rsl::streams
