#pragma once

#include <cstdint>
#include <random>

namespace herald::search {

// Stable 64-bit finalizer (splitmix64); bijective, well-mixed.
std::uint64_t mix64(std::uint64_t z);

// Russian-doll random streams: every random decision in the search draws
// from a generator whose seed is a pure function of (master seed, stage,
// generation, slot, purpose).  No generator is ever shared between slots,
// so the schedule of parallel evaluation or reproduction cannot change any
// draw, and a resumed run replays the exact stream of an uninterrupted one.
enum class Stream : std::uint64_t {
  Sampling = 1,    // initial population genomes
  Tournament = 2,  // parent selection
  Crossover = 3,   // recombination choices
  Mutation = 4,    // perturbation draws
};

std::uint64_t stream_seed(std::uint64_t master, int stage, int generation,
                          int slot, Stream purpose);

std::mt19937_64 stream_rng(std::uint64_t master, int stage, int generation,
                           int slot, Stream purpose);

}  // namespace herald::search
