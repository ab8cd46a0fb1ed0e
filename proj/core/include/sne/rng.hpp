#pragma once

#include <cstdint>
#include <random>

namespace sne {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a master seed and up to two
// stream coordinates (node id, walk index, epoch, sample index, ...).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t s = splitmix64(seed ^ 0x2545f4914f6cdd1dULL);
  s = splitmix64(s ^ a);
  return splitmix64(s ^ b);
}

// Domain tags keep unrelated consumers of the same user seed on
// disjoint streams.
namespace seed_tag {
inline constexpr std::uint64_t walk = 0x77616c6bULL;
inline constexpr std::uint64_t init = 0x696e6974ULL;
inline constexpr std::uint64_t negatives = 0x6e656773ULL;
inline constexpr std::uint64_t shuffle = 0x73687566ULL;
inline constexpr std::uint64_t synthetic = 0x73796e74ULL;
inline constexpr std::uint64_t link = 0x6c696e6bULL;
inline constexpr std::uint64_t fold = 0x666f6c64ULL;
}  // namespace seed_tag

// mt19937_64 plus hand-rolled bounded draws. std::uniform_int_distribution
// is implementation-defined, so it cannot back a byte-identical output
// contract; masked rejection can.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // uniform in [0, n); n == 0 is treated as n == 1
  std::uint64_t next_below(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t mask = n - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
      std::uint64_t v = gen_() & mask;
      if (v < n) return v;
    }
  }

  // uniform in [0, 1)
  double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace sne
