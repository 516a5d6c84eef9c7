// Counter-based random number generation.
//
// Every observation in this library is a pure function of
// (run_seed, alternative, draw_index).  This makes runs replayable and
// scheduling-invariant: the asynchronous runtime and the synchronous
// algorithms see byte-identical draws for the same logical draw index,
// no matter which worker produced them or in which order.
#pragma once

#include <cstdint>
#include <cmath>

namespace vscreen {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

// Small splitmix64 engine seeded from an arbitrary 64-bit state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on (0, 1); never returns 0 or 1.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (cosine branch).
  double next_normal() {
    double u1 = next_uniform();
    double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

 private:
  std::uint64_t state_;
};

// Engine for the draw_index-th observation of an alternative under run_seed.
inline Rng draw_rng(std::uint64_t run_seed, std::uint32_t alt,
                    std::uint64_t draw_index) {
  return Rng(hash_combine(hash_combine(run_seed, alt), draw_index));
}

// Replication r of a master seed; replications are reorderable.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return hash_combine(master, mix64(index));
}

}  // namespace vscreen
