#pragma once

#include <cstdint>
#include <vector>

namespace mga {

// The V-learning rate alpha_t = (H+1)/(H+t) and its auxiliary sequence
//   alpha_t^0 = prod_{j<=t} (1-alpha_j),
//   alpha_t^i = alpha_i * prod_{j=i+1..t} (1-alpha_j).
// Since alpha_1 = 1, alpha_t^0 vanishes for t >= 1 and the alpha_t^i sum
// to 1.
inline double alpha_t(int horizon, std::int64_t t) {
  return static_cast<double>(horizon + 1) / (horizon + t);
}

// Direct evaluation of {alpha_t^i}_{i=1..t}; quadratic, for tests and small t.
inline std::vector<double> alpha_weights(int horizon, std::int64_t t) {
  std::vector<double> w(static_cast<std::size_t>(t));
  for (std::int64_t i = 1; i <= t; ++i) {
    double v = alpha_t(horizon, i);
    for (std::int64_t j = i + 1; j <= t; ++j) v *= 1.0 - alpha_t(horizon, j);
    w[i - 1] = v;
  }
  return w;
}

// G_t = prod_{j=2..t} (1-alpha_j), so alpha_t^i = (alpha_i/G_i) * G_t.
// Lets weighted sums over the auxiliary sequence be maintained in O(1) per
// step. G_t decays polynomially (~t^-(H+1)); fine in double at desk scale.
inline double g_step(int horizon, std::int64_t t, double g_prev) {
  return t <= 1 ? 1.0 : g_prev * (1.0 - alpha_t(horizon, t));
}

}  // namespace mga
