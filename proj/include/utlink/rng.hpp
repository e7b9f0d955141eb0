#pragma once

#include <cstdint>
#include <random>

namespace utlink {

// SplitMix64 mixer. Used both to whiten user-supplied seeds and to derive
// independent per-stream seeds from one master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic seed derivation: (master, stream) -> seed. Streams 0,1,2,...
// give decorrelated generators; the mapping is part of the reproducibility
// contract (same master seed => byte-identical outputs).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x517cc1b727220a95ull));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(splitmix64(seed));
}

}  // namespace utlink
