#pragma once

// Portable seeded randomness. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; the distributions below are implemented
// here (not with <random> distributions, which vary between standard
// libraries) so a given seed yields the same numbers everywhere.
//
// Stream splitting: independent consumers draw from Rng::stream(seed, id),
// which seeds the engine with splitmix64(seed ^ splitmix64(id)).

#include <cstdint>
#include <random>

namespace uavbs {

std::uint64_t splitmix64(std::uint64_t x);

/// Mixes a base seed with a tuple of integers into a new seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0, std::uint64_t d = 0);

enum class StreamId : std::uint64_t {
  kScenario = 1,
  kRandomPlacement = 2,
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t seed, StreamId id);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);
  /// Standard normal via Box-Muller; one engine pair per call.
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace uavbs
