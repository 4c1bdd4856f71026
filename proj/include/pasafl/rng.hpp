#pragma once

#include <cstdint>
#include <random>

namespace pasafl {

using Rng = std::mt19937_64;

// Purpose tags keep the streams for different consumers disjoint.
enum class StreamTag : std::uint32_t {
  TrustGraph = 1,
  Profiles = 2,
  ModelUsers = 3,
  Decision = 4,
  Auction = 5,
  Availability = 6,
};

namespace detail {
// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Independent stream for (seed, tag, a, b). Typical keys are (do_id, step)
/// so evaluation order never changes what a given owner draws.
/// The key is folded into one 64-bit seed; seed_seq is too slow to run
/// twice per owner per step.
inline Rng make_stream(std::uint64_t seed, StreamTag tag, std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t k = detail::mix64(seed);
  k = detail::mix64(k ^ static_cast<std::uint64_t>(tag));
  k = detail::mix64(k ^ a);
  k = detail::mix64(k ^ b);
  return Rng(k);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline double uniform(Rng& rng, double lo, double hi) {
  if (!(hi > lo)) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  if (hi <= lo) return lo;
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace pasafl
