#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace orthosim {

/// SplitMix64 finalizer. Used for seed derivation; stable across platforms.
std::uint64_t splitmix64(std::uint64_t x);

/// Per-trial seed: splitmix64(splitmix64(splitmix64(base) ^ a) ^ b).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

/// Seeded random source.
///
/// Wraps mt19937_64 (whose output sequence is fixed by the standard) and
/// derives integers, doubles and shuffles itself, since the std
/// distributions are allowed to differ between library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bit() { return (engine_() >> 63) != 0; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Unbiased integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Fisher-Yates shuffle driven by below().
  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  /// Independent child stream; the parent advances by one draw.
  Rng split(std::uint64_t label) { return Rng(derive_seed(next(), label)); }

 private:
  std::mt19937_64 engine_;
};

/// Uniform random subset of size k from {0..n-1}, returned sorted.
std::vector<std::size_t> sample_subset(std::size_t n, std::size_t k, Rng& rng);

std::vector<bool> random_bits(std::size_t n, Rng& rng);

}  // namespace orthosim
