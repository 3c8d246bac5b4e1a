#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "mga/attacks.hpp"
#include "mga/simulate.hpp"
#include "mga/types.hpp"

namespace mga {

// Black-box optimal-policy identification. The attacker knows only the
// dimensions of the game; it forces every agent onto its current greedy
// policy, pacifies them with reward 1, observes its own realized reward
// r_dagger, and maintains optimistic/pessimistic value bounds with bonus
//   B(N) = (H sqrt(S) + 1) sqrt(log(2 A H tau / delta) / (2 N)).
// The incumbent target minimizes the empirical bound gap plus the
// confidence radius H sqrt(S log(2 tau / delta) / (2 k)).
class ExplorationAttack : public AttackHooks {
 public:
  ExplorationAttack(int num_states, int num_joint_actions, int horizon,
                    std::int64_t tau, double delta);

  void episode_begin(std::int64_t episode) override;
  int on_actions(int h, int s, int /*joint_action*/, Rng& /*rng*/) override {
    return greedy_.at(h, s);
  }
  void on_rewards(int /*h*/, int /*s*/, int /*pre*/, int /*post*/,
                  std::span<const double> /*env_rewards*/,
                  std::span<double> observed) override {
    std::fill(observed.begin(), observed.end(), 1.0);
  }
  void on_step(int h, const StepRecord& record) override;
  void episode_end(const Trajectory& trajectory) override;

  const DeterministicJointPolicy* current_target() const override {
    return &incumbent_;
  }
  const DeterministicJointPolicy& incumbent() const { return incumbent_; }
  const DeterministicJointPolicy& greedy() const { return greedy_; }
  double incumbent_stat() const { return best_stat_; }
  std::int64_t tau() const { return tau_; }
  double bonus(std::int64_t n) const;

  double q_upper(int h, int s, int a) const { return q_up_[sa_index(h, s, a)]; }
  double q_lower(int h, int s, int a) const { return q_lo_[sa_index(h, s, a)]; }
  std::int64_t count(int h, int s, int a) const {
    return n_sa_[sa_index(h, s, a)];
  }

 private:
  std::size_t s_index(int h, int s) const {
    return static_cast<std::size_t>(h) * num_states_ + s;
  }
  std::size_t sa_index(int h, int s, int a) const {
    return s_index(h, s) * num_joint_actions_ + a;
  }
  // Backward pass over visited entries, then the incumbent rule at the
  // start of episode k.
  void refresh_bounds();
  void maybe_adopt_incumbent(std::int64_t episode);

  int num_states_;
  int num_joint_actions_;
  int horizon_;
  std::int64_t tau_;
  double delta_;
  double log_bonus_;  // log(2 A H tau / delta)

  std::vector<std::int64_t> n_sa_;       // H x S x A
  std::vector<std::int64_t> n_next_;     // (H-1) x S x A x S
  std::vector<double> r_hat_;            // H x S x A, running mean of r_dagger
  std::vector<double> q_up_, q_lo_;      // H x S x A
  std::vector<double> v_up_, v_lo_;      // H x S
  std::vector<std::int64_t> n0_;         // S
  std::vector<double> p0_hat_;           // S
  std::int64_t episodes_done_ = 0;

  DeterministicJointPolicy greedy_;
  DeterministicJointPolicy incumbent_;
  double best_stat_ = std::numeric_limits<double>::infinity();
};

// Runs the exploration phase standalone for tau episodes and returns the
// identified target. The behavior source only matters for cost accounting
// (its actions are always overridden). Throws on tau < 1.
DeterministicJointPolicy exploration_phase(
    const MarkovGameSpec& spec, std::span<const double> attacker_reward,
    std::int64_t tau, double delta, Rng& rng,
    ExplorationAttack* state_out = nullptr);

// The two-phase black-box strategy: episodes 1..tau run the exploration
// attack, later episodes run the mixed attack against the learned target.
class ApproximateMixedAttack : public AttackHooks {
 public:
  ApproximateMixedAttack(const MarkovGameSpec& spec_shape, std::int64_t tau,
                         double delta);

  void episode_begin(std::int64_t episode) override;
  int on_actions(int h, int s, int joint_action, Rng& rng) override;
  void on_rewards(int h, int s, int pre_action, int post_action,
                  std::span<const double> env_rewards,
                  std::span<double> observed) override;
  void on_step(int h, const StepRecord& record) override;
  void episode_end(const Trajectory& trajectory) override;
  const DeterministicJointPolicy* current_target() const override;

  bool exploring() const { return episode_ <= exploration_.tau(); }
  const ExplorationAttack& exploration() const { return exploration_; }
  const DeterministicJointPolicy& learned_target() const;

 private:
  // Only the shape of the spec is read (dimensions); the attack itself stays
  // black-box.
  const MarkovGameSpec* spec_;
  ExplorationAttack exploration_;
  std::optional<MixedAttack> mixed_;
  DeterministicJointPolicy learned_;
  std::int64_t episode_ = 0;
};

}  // namespace mga
