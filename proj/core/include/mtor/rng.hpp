#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mtor {

// Portable draws on top of mt19937_64. The standard distributions are not
// bit-reproducible across library implementations, so anything that promises
// seed-stable output (ELM weights, synthetic data) goes through these instead.

/// Uniform double in [0, 1) from the top 53 bits of the generator output.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform_in(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform01(gen);
}

/// Standard normal via Box-Muller.
inline double standard_normal(std::mt19937_64& gen) {
  double u1 = uniform01(gen);
  while (u1 <= 0.0) u1 = uniform01(gen);
  const double u2 = uniform01(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace mtor
