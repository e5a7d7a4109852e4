#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace cbtail {

using Engine = std::mt19937_64;

// Derives an independent stream from a master seed and a path of counters,
// e.g. (cell, replicate, purpose, bootstrap index). The engine is seeded
// through std::seed_seq over the 32-bit halves of every word, so the stream
// for a given path never depends on which thread consumes it or in what
// order streams are created.
Engine make_stream(std::uint64_t master_seed,
                   std::initializer_list<std::uint64_t> path);
Engine make_stream(std::uint64_t master_seed, std::span<const std::uint64_t> path);

// Uniform on the open interval (0, 1) with 53 random bits.
inline double uniform_open(Engine& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Standard exponential by inversion.
inline double standard_exponential(Engine& rng) {
  return -std::log(uniform_open(rng));
}

}  // namespace cbtail
