#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace parsley {

// SplitMix64 step; also used as a cheap integer mixer for hashing.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Combine values into a single seed, order-sensitive.
constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b));
}

// Deterministic random stream identified by (seed, label).
//
// Distinct labels give statistically independent substreams of the same
// root seed. The engine is mt19937_64 (bit-exact by the standard); the
// distribution code below is our own so that draws do not depend on the
// standard library implementation.
class RngStream {
 public:
  RngStream(std::uint64_t root_seed, std::string_view label)
      : label_(label), engine_(mix_seed(root_seed, fnv1a64(label))) {}

  std::uint64_t next_u64() { return engine_(); }

  // Unbiased draw in [0, bound) via rejection. bound must be >= 1.
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  // Inclusive integer range.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    uniform_below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform_real(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  bool bernoulli(double p) { return next_double() < p; }

  // Box-Muller without pair caching: exactly two u64 draws per call.
  double normal(double mean, double stddev);

  const std::string& label() const { return label_; }

 private:
  std::string label_;
  std::mt19937_64 engine_;
};

}  // namespace parsley
