#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace infwick {

// Counter-mode SplitMix64. Every draw is a pure function of (key, counter),
// so any value is reproducible from the seed and the stream labels alone,
// on any platform. Reports that carry a seed refer to this generator.
inline constexpr const char* kPrngVersion = "splitmix64-ctr/1";

namespace prng_detail {

inline constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace prng_detail

class Prng {
 public:
  explicit Prng(std::uint64_t key) : key_(key) {}

  // Derives an independent stream key from a seed and a label path,
  // e.g. Prng::stream(seed, {kStreamGue, n, sample_index}).
  static Prng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> labels) {
    std::uint64_t k = prng_detail::mix(seed + prng_detail::kGamma);
    for (std::uint64_t label : labels) {
      k = prng_detail::mix(k ^ (label + prng_detail::kGamma));
    }
    return Prng(k);
  }

  std::uint64_t next() { return prng_detail::mix(key_ + (++counter_) * prng_detail::kGamma); }

  // Unbiased integer in [0, bound) via rejection sampling.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(t);
    have_cached_ = true;
    return r * std::cos(t);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

// Stream labels, kept stable so seeded artifacts stay reproducible.
inline constexpr std::uint64_t kStreamPermutation = 1;
inline constexpr std::uint64_t kStreamGue = 2;
inline constexpr std::uint64_t kStreamStatDraw = 3;
inline constexpr std::uint64_t kStreamAuxPermutation = 4;

}  // namespace infwick
