#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace intentgate {

// Deterministic, portable PRNG (splitmix64). Used wherever output bytes must
// be reproducible across runs and platforms; std::shuffle and the standard
// distributions are implementation-defined, so they are avoided here.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1), 53 mantissa bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Unbiased uniform in [0, bound); bound must be > 0.
  uint64_t next_below(uint64_t bound) {
    uint64_t threshold = (~bound + 1) % bound;
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Fisher-Yates; deterministic given the seed and input order.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t state_;
};

}  // namespace intentgate
