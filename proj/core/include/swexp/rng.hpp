#pragma once

#include <cstdint>

namespace swexp {

/// Splittable counter-based generator. Every draw is a pure function of
/// (seed, stream, counter), so simulations replay bit-identically on any
/// platform and independent streams can be handed to concurrent work.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  /// Derive an independent stream from this one.
  CounterRng split(std::uint64_t substream) const {
    return CounterRng(seed_, mix(stream_ ^ (0x9E3779B97F4A7C15ULL + substream)));
  }

  std::uint64_t bits(std::uint64_t counter) const {
    std::uint64_t z = seed_ + 0x9E3779B97F4A7C15ULL * (counter + 1);
    z ^= rotl(stream_ * 0xBF58476D1CE4E5B9ULL, 32);
    return mix(z);
  }

  /// Uniform double in [0, 1).
  double uniform01(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). Fixed-point multiply; the bias of
  /// bound/2^64 is negligible for every bound used here.
  std::uint32_t below(std::uint64_t counter, std::uint32_t bound) const {
    const unsigned __int128 m =
        static_cast<unsigned __int128>(bits(counter)) * static_cast<unsigned __int128>(bound);
    return static_cast<std::uint32_t>(m >> 64);
  }

  /// Standard normal via Box-Muller on two counters.
  double normal(std::uint64_t counter) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace swexp
