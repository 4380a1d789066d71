#include "uavbs/rng.hpp"

#include <cmath>
#include <numbers>

namespace uavbs {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c, std::uint64_t d) {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t v : {a, b, c, d}) h = splitmix64(h ^ v);
  return h;
}

Rng Rng::stream(std::uint64_t seed, StreamId id) {
  return Rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(id))));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

int Rng::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo + 1);
  return lo + static_cast<int>(static_cast<std::uint64_t>(uniform() * static_cast<double>(span)));
}

double Rng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace uavbs
