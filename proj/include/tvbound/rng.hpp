#pragma once

#include <cstdint>

namespace tvbound {

// splitmix64 step, used to derive decorrelated substream seeds from a user
// seed. The generator family for all Monte Carlo work is std::mt19937_64
// (byte-exact across conforming standard libraries); uniform doubles are
// produced from the top 53 bits so no implementation-defined distribution
// code enters the stream.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of substream `index` derived from the user-facing seed.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) + index);
}

// Uniform double in [0, 1) from one 64-bit draw.
inline double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace tvbound
