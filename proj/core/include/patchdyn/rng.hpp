#pragma once

#include <cstdint>

namespace patchdyn {

// SplitMix64 finalizer. Used as a stateless hash so that per-cell draws in a
// sweep depend only on (seed, cell, draw) and never on evaluation order.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Deterministic uniform draw in [0, 1) keyed by seed, cell index and draw
// counter.
inline double keyed_uniform(std::uint64_t seed, std::uint64_t cell,
                            std::uint64_t draw) {
  std::uint64_t h = splitmix64(seed ^ 0x6A09E667F3BCC909ull);
  h = splitmix64(h ^ (cell * 0xD1342543DE82EF95ull));
  h = splitmix64(h ^ (draw * 0xA0761D6478BD642Full));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace patchdyn
