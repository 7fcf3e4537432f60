#pragma once

#include <cstdint>

namespace tilesim {

// SplitMix64: 64-bit state, closed-form mixing (Steele et al.). Used for all
// stimulus generation so runs reproduce bit-exactly across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n) via the 128-bit multiply reduction; n == 0 is invalid.
  uint64_t below(uint64_t n) {
    return uint64_t((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Uniform over the *inclusive* range [0, hi].
  uint64_t up_to(uint64_t hi) { return hi == UINT64_MAX ? next() : below(hi + 1); }

  // Uniform signed integer in [lo, hi].
  int64_t range(int64_t lo, int64_t hi) {
    return lo + int64_t(below(uint64_t(hi - lo + 1)));
  }

  // Uniform double in [0, 1) with 53 random bits.
  double unit() { return double(next() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

}  // namespace tilesim
