#pragma once

#include <cstdint>
#include <vector>

namespace fsl {

// SplitMix64 (Steele/Lea/Flood). Fixed constants make streams reproducible
// across platforms and implementations:
//   state += 0x9E3779B97F4A7C15
//   z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; second draw of each pair is cached.
  double next_gaussian();

  // Uniform integer in [0, n).
  uint64_t next_below(uint64_t n) { return next_u64() % n; }

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Deterministic substream derivation (e.g. one stream per fold or alpha).
  static uint64_t derive(uint64_t seed, uint64_t stream) {
    Rng r(seed ^ (0xA3EC647659359ACDULL * (stream + 1)));
    return r.next_u64();
  }

 private:
  uint64_t state_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace fsl
