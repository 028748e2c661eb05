#pragma once

#include <cstdint>
#include <random>

namespace dvio {

// splitmix64, used to decorrelate seeds derived from (base seed, stream id).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent engine for a named stream of one run. Streams with distinct ids
// never share state, so adding a consumer does not perturb the others.
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ stream));
}

}  // namespace dvio
