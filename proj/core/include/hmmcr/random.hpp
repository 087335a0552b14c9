#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace hmmcr {

/// All randomness in hmmcr flows from one seeded engine of this type.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double standardNormal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

/// Draws an index with probability proportional to `weights` (non-negative,
/// positive sum).
template <typename Weights>
int drawCategorical(Rng& rng, const Weights& weights, double total) {
  double u = uniform01(rng) * total;
  const int n = static_cast<int>(weights.size());
  for (int i = 0; i < n; ++i) {
    u -= weights[i];
    if (u < 0.0) return i;
  }
  // Rounding left u >= 0: return the last index with positive weight.
  for (int i = n - 1; i >= 0; --i) {
    if (weights[i] > 0.0) return i;
  }
  return n - 1;
}

/// Derives an independent child seed (splitmix64 finalizer).
inline std::uint64_t deriveSeed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace hmmcr
