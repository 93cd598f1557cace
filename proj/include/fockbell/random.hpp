#pragma once

#include <cstdint>

namespace fockbell {

/// SplitMix64 generator. Output depends only on the seed, so streams are
/// reproducible across platforms and standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  /// Independent stream for (seed, index), e.g. one per sample chain.
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 outer(seed ^ 0x6a09e667f3bcc909ULL);
    std::uint64_t s = outer.next();
    SplitMix64 inner(index + 0x3c6ef372fe94f82bULL);
    return SplitMix64(s ^ inner.next());
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

}  // namespace fockbell
