#pragma once

#include <cstdint>
#include <random>

namespace femda {

using Rng = std::mt19937_64;

// splitmix64 step (Steele, Lea, Flood 2014). Used to derive independent
// seeds from a master seed so that experiment streams never overlap.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic seed for (master, stream, index). Streams separate the
// independent random consumers of an experiment (data generation,
// contamination, splitting); the index enumerates repetitions or blocks.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index) {
  return splitmix64(splitmix64(master + stream * 0x9e3779b97f4a7c15ULL) +
                    index + 1);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace femda
