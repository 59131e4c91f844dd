#pragma once

#include <cstdint>

namespace henlab {

// SplitMix64. One fixed generator for every stochastic routine in the
// library so that equal seeds give bit-identical runs everywhere. The
// increment and the two multipliers are the standard constants; the output
// function is the murmur-style finalizer.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in {0, ..., n-1}. Plain multiply-shift; the bias for the tiny n
  // used here (2..4 letters, grid cells) is far below anything observable.
  std::uint32_t next_below(std::uint32_t n) {
    return static_cast<std::uint32_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Uniform in [lo, hi).
  double next_in(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Standard normal via the Marsaglia polar method (spare cached).
  double next_gaussian();

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Finalizer alone, usable as a 64-bit hash.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Decorrelated stream for a (seed, index) pair. Every parallelizable loop
// (trials, pixels, grid cells) draws from its own substream, which makes the
// result independent of iteration order.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(seed ^ mix64(index + 0x9e3779b97f4a7c15ULL));
}

}  // namespace henlab
