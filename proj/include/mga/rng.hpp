#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace mga {

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Draws an index from an (unnormalized is fine) nonnegative weight vector.
// Mass left over from rounding goes to the last positive-weight entry.
inline int sample_categorical(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = uniform01(rng) * total;
  double cum = 0.0;
  int last_positive = 0;
  for (int i = 0; i < static_cast<int>(weights.size()); ++i) {
    if (weights[i] > 0.0) last_positive = i;
    cum += weights[i];
    if (u < cum) return i;
  }
  return last_positive;
}

inline bool bernoulli(double p, Rng& rng) { return uniform01(rng) < p; }

}  // namespace mga
