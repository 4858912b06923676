#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace wsc {

// Engine plus distribution helpers whose output does not depend on the
// standard library's (implementation-defined) distribution algorithms, so
// seeded runs reproduce across toolchains.
using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and a list of
// coordinates (e.g. retry, iteration, ant index).
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = splitmix64(seed);
  for (auto c : coords) {
    h = splitmix64(h ^ splitmix64(c + 0x632BE59BD9B4E019ull));
  }
  return h;
}

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

// Uniform double in [0, 1).
inline double uniform01(Engine &eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(Engine &eng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(eng);
}

// Uniform integer in [0, n) by rejection sampling. n must be positive.
inline std::size_t uniform_index(Engine &eng, std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = Engine::max() - Engine::max() % bound;
  std::uint64_t r;
  do {
    r = eng();
  } while (r >= limit);
  return static_cast<std::size_t>(r % bound);
}

// Uniform integer in [lo, hi].
inline std::size_t uniform_int(Engine &eng, std::size_t lo, std::size_t hi) {
  return lo + uniform_index(eng, hi - lo + 1);
}

inline bool bernoulli(Engine &eng, double p) { return uniform01(eng) < p; }

} // namespace wsc
