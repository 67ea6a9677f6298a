#pragma once

#include <cstdint>

namespace spreadnet::rng {

// SplitMix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based generator: output i is mix64(key + i * gamma).  Distinct
// (seed, stream) pairs give statistically independent sequences, so each
// network layer or simulation trial can own a stream of the same seed.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix64(seed + 0x9E3779B97F4A7C15ULL) ^
             mix64((stream + 1) * 0xD1B54A32D192ED03ULL)) {}

  std::uint64_t next_u64() {
    return mix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL);
  }

  // Uniform in [0, 1), 53 bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Poisson draw by inverse-CDF product search.  The mean is consumed in
// chunks of 500 so the running product stays above double underflow.
int poisson(CounterRng& g, double mean);

}  // namespace spreadnet::rng
