#pragma once

#include <cstdint>
#include <span>

namespace anomalens {

/// SplitMix64 step. Used to expand seeds and derive independent substreams.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Mixes a seed with a stream id into a fresh seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// xoshiro256** (Blackman & Vigna) seeded through SplitMix64.
///
/// Every random draw in the library goes through this type so that data,
/// initialization and shuffling are bit-reproducible from a seed alone:
///   uniform()  = (next() >> 11) * 2^-53            in [0, 1)
///   normal()   = Box-Muller on (1 - uniform(), uniform()), the sine
///                branch cached for the following call
///   below(n)   = rejection sampling on next() % n  (no modulo bias)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept;

  std::uint64_t next() noexcept;
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept;
  double normal() noexcept;
  double normal(double mean, double stddev) noexcept;
  std::uint64_t below(std::uint64_t n) noexcept;
  bool bernoulli(double p) noexcept;

  /// Fisher-Yates shuffle driven by below().
  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// Independent generator for a numbered substream of this generator's seed.
  Rng substream(std::uint64_t stream) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t state_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace anomalens
