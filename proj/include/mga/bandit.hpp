#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "mga/errors.hpp"
#include "mga/rng.hpp"

namespace mga {

// Follow-the-regularized-leader bandit over B arms with weighted
// importance-sampled losses:
//   lhat_t(b) = l_t(b_t) 1[b_t=b] / (theta_t(b) + gamma_t)
//   theta_{t+1}(b) propto exp[-(gamma_t/w_t) sum_{i<=t} w_i lhat_i(b)]
// with gamma_t = sqrt(H log B / (B t)) and w_t = alpha_t prod_{i=2..t}
// (1-alpha_i)^{-1}. The horizon H couples the bandit to the episodic game
// it serves.
class ExpWeightsBandit {
 public:
  ExpWeightsBandit(int num_arms, int horizon)
      : num_arms_(num_arms),
        horizon_(horizon),
        log_arms_(std::log(static_cast<double>(num_arms))),
        theta_(num_arms, 1.0 / num_arms),
        weighted_loss_(num_arms, 0.0) {
    if (num_arms < 1) throw SpecError("bandit needs at least one arm");
  }

  int sample(Rng& rng) const { return sample_categorical(theta_, rng); }

  // One Algorithm-3 update for the pulled arm and its observed loss in [0,1].
  void update(int arm, double loss) {
    if (arm < 0 || arm >= num_arms_) throw SpecError("bad arm index");
    if (!(loss >= -1e-12 && loss <= 1.0 + 1e-12)) {
      throw SpecError("bandit loss outside [0,1]");
    }
    ++t_;
    if (t_ >= 2) w_ *= static_cast<double>(horizon_ + t_ - 1) / (t_ - 1);
    double gamma = std::sqrt(horizon_ * log_arms_ / (num_arms_ * t_));
    weighted_loss_[arm] += w_ * loss / (theta_[arm] + gamma);

    // Exponential weights in log space; shift by the max exponent and floor
    // far-collapsed arms so theta stays strictly positive in double.
    double scale = gamma / w_;
    double best = weighted_loss_[0];
    for (double wl : weighted_loss_) best = std::min(best, wl);
    double norm = 0.0;
    for (int b = 0; b < num_arms_; ++b) {
      double e = -scale * (weighted_loss_[b] - best);
      theta_[b] = std::exp(std::max(e, -700.0));
      norm += theta_[b];
    }
    for (double& p : theta_) p /= norm;
  }

  std::span<const double> distribution() const { return theta_; }
  std::int64_t pulls() const { return t_; }
  int num_arms() const { return num_arms_; }
  double current_weight() const { return w_; }

 private:
  int num_arms_;
  int horizon_;
  double log_arms_;
  std::int64_t t_ = 0;
  double w_ = 1.0;
  std::vector<double> theta_;
  std::vector<double> weighted_loss_;
};

}  // namespace mga
