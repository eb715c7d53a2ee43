#pragma once

#include <cstdint>
#include <random>

namespace floq {

// Finalizer of splitmix64; used both to whiten user seeds and to derive
// per-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream seeds: seed_i = mix(base_seed, stream_index). Streams derived from
// the same base seed are independent for all practical purposes and the
// mapping is fixed, so results depend only on (base_seed, stream count).
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 0x633d5169b145fb2bULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  std::uint64_t word() { return gen_(); }

  // k uniform random bits in the low positions, 0 <= k <= 64.
  std::uint64_t bits(unsigned k) {
    if (k == 0) return 0;
    std::uint64_t w = gen_();
    return (k >= 64) ? w : (w & ((std::uint64_t{1} << k) - 1));
  }

  bool bit() { return gen_() >> 63; }

  // Uniform integer in [0, n). n >= 1.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t w;
    do {
      w = gen_();
    } while (w >= limit);
    return w % n;
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace floq
