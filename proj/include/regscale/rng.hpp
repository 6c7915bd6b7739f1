#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace regscale {

// Each consumer of randomness draws from its own stream derived from the run seed.
enum class SeedPurpose : std::uint64_t {
  Layout = 1,
  Surfaces = 2,
  Sampling = 3,
  Noise = 4,
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, SeedPurpose purpose, std::uint64_t index = 0);

// mt19937_64 output is fixed by the standard; the distributions below are
// written out so draws do not depend on the standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  // Standard normal via Box-Muller.
  double normal();
  int sign() { return (next() >> 63) ? 1 : -1; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace regscale
