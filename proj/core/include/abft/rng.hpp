#pragma once

#include <cstdint>
#include <random>

namespace abft {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; the fixed splitting function for per-trial streams.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream) {
  return mix64(mix64(master_seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

inline Rng make_stream(std::uint64_t master_seed, std::uint64_t stream) {
  return Rng{derive_seed(master_seed, stream)};
}

}  // namespace abft
