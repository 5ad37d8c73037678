#pragma once

#include <cstdint>
#include <random>

namespace slicesim {

using Rng = std::mt19937_64;

// splitmix64 finalizer, used to derive independent stream seeds from a master
// seed. Every random draw in the project flows through one of these streams,
// so a run is fully determined by the master seed.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t s = mix64(master);
  s = mix64(s ^ stream);
  s = mix64(s ^ a);
  s = mix64(s ^ b);
  return s;
}

// named stream tags
namespace streams {
constexpr std::uint64_t kDensity = 0xD1;
constexpr std::uint64_t kTraffic = 0xD2;
constexpr std::uint64_t kAgentInit = 0xA1;
constexpr std::uint64_t kNoise = 0xA2;
constexpr std::uint64_t kBuffer = 0xA3;
constexpr std::uint64_t kWarmup = 0xA4;
constexpr std::uint64_t kEpisode = 0xE1;
}  // namespace streams

}  // namespace slicesim
