#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace hyfleet {

// SplitMix64 finalizer. Used to derive independent substream seeds.
std::uint64_t mix64(std::uint64_t x);

// Derives a substream seed from a base seed and a list of indices.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> indices);

// Deterministic generator with platform-independent output.
//
// std::mt19937_64 has a bit-exact sequence mandated by the standard; the
// standard distributions do not, so the conversions below are done by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n). n must be > 0. Unbiased (rejection sampling).
  std::uint64_t below(std::uint64_t n);

  // Uniform integer in [lo, hi] (inclusive).
  std::int64_t between(std::int64_t lo, std::int64_t hi);

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hyfleet
