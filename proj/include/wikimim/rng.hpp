#pragma once

#include <cstdint>
#include <random>

namespace wikimim {

// Seeded random source. Only std::mt19937_64 (whose output sequence is fixed
// by the standard) is used underneath; the derived draws below are computed
// here rather than through std::*_distribution, whose algorithms vary
// between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_int(std::uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  // Uniform double in (0, 1].
  double uniform01_open_low() { return 1.0 - uniform01(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; the spare value is cached.
  double normal();

  double lognormal(double mu, double sigma);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wikimim
