#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace corf {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for stream `stream` of a run keyed by `seed`. Streams for distinct
/// (seed, stream) pairs are statistically independent, and the mapping does
/// not depend on scheduling, so per-tree streams are reproducible under any
/// thread count.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Deterministic generator. Wraps std::mt19937_64 and converts raw bits
/// itself so results do not depend on the standard library's distribution
/// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t bits() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [0, n); n must be positive.
  std::size_t below(std::size_t n);
  /// Standard normal (Marsaglia polar method, no cached second value).
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace corf
