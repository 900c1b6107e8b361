#pragma once

#include <cstdint>

namespace cesarolab {

// Counter-based generator: the k-th output is a SplitMix64-style finalizer
// applied to key + k * gamma.  Streams derived from (seed, stream) are
// statistically independent and replicas can be generated in any order
// without sharing state.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(derive_key(seed, stream)) {}

  std::uint64_t next_u64() { return finalize(key_ + counter_++ * kGamma); }

  // Uniform on the open interval (0, 1); exact zeros are rejected so that
  // multiplicative chains never collapse by accident of rounding.
  double uniform_open01() {
    for (;;) {
      const double u = (next_u64() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

  static std::uint64_t finalize(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
    return finalize(finalize(seed + kGamma) ^
                    finalize(stream * kGamma + 0x6A09E667F3BCC909ull));
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace cesarolab
