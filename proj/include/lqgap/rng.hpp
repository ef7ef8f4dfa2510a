#pragma once

#include <cstdint>

namespace lqgap {

// splitmix64 (Steele, Lea, Flood 2014). Used in place of <random> engines and
// distributions because their output sequences are not pinned by the C++
// standard, and experiment outputs here must be byte-identical across
// platforms and standard libraries.
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += kGolden;
    return mix64(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

 private:
  std::uint64_t state_;
};

// Decorrelated per-sample stream seed. Sample `index` of a study keyed by
// `master` always gets the same stream, independent of scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master + (index + 1) * kGolden);
}

}  // namespace lqgap
