#include "herald/search/rng.hpp"

namespace herald::search {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, int stage, int generation,
                          int slot, Stream purpose) {
  std::uint64_t s = mix64(master);
  s = mix64(s ^ static_cast<std::uint64_t>(stage));
  s = mix64(s ^ static_cast<std::uint64_t>(generation));
  s = mix64(s ^ static_cast<std::uint64_t>(slot));
  s = mix64(s ^ static_cast<std::uint64_t>(purpose));
  return s;
}

std::mt19937_64 stream_rng(std::uint64_t master, int stage, int generation,
                           int slot, Stream purpose) {
  return std::mt19937_64(stream_seed(master, stage, generation, slot, purpose));
}

}  // namespace herald::search
