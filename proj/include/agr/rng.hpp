#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace agr {

// splitmix64 finalizer, used to spread raw seeds and derive substreams
constexpr uint64_t split_mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// stable derivation of an independent stream seed from (base, salt)
constexpr uint64_t derive_seed(uint64_t base, uint64_t salt) {
  return split_mix64(base ^ split_mix64(salt));
}

// Deterministic RNG with portable sampling primitives. mt19937_64 output is
// pinned by the standard; the std <random> distributions are not, so every
// sampling routine that must reproduce bit-for-bit across platforms lives
// here instead.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(split_mix64(seed)) {}

  uint64_t next_u64() { return gen_(); }

  // unbiased integer in [0, n), Lemire's multiply-shift rejection method
  uint64_t bounded(uint64_t n) {
    using u128 = unsigned __int128;
    uint64_t x = next_u64();
    u128 m = static_cast<u128>(x) * static_cast<u128>(n);
    uint64_t l = static_cast<uint64_t>(m);
    if (l < n) {
      uint64_t t = -n % n;
      while (l < t) {
        x = next_u64();
        m = static_cast<u128>(x) * static_cast<u128>(n);
        l = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  // inclusive range
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(bounded(static_cast<uint64_t>(hi - lo + 1)));
  }

  // uniform in [0, 1) with 53 random bits
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // index sampled proportionally to non-negative weights (need not sum to 1);
  // falls back to the last positive weight under accumulated rounding
  size_t categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double r = uniform01() * total;
    double acc = 0.0;
    size_t last_positive = 0;
    for (size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] > 0.0) last_positive = i;
      acc += weights[i];
      if (r < acc) return i;
    }
    return last_positive;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace agr
