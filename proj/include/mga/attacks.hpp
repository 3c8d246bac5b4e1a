#pragma once

#include <optional>
#include <vector>

#include "mga/conditions.hpp"
#include "mga/post_attack.hpp"
#include "mga/simulate.hpp"
#include "mga/types.hpp"

namespace mga {

// Core rewrite of the white-box action attack: deviating joint actions are
// replaced by the target with probability d/m and by the fallback otherwise,
// where d = m/2 + (#agents on target)/2. On-target joint actions pass
// through.
int d_portion_rewrite(const MarkovGameSpec& spec, int h, int s, int joint,
                      const DeterministicJointPolicy& target,
                      const DeterministicJointPolicy& worse, Rng& rng);

// Core rewrite of the white-box reward attack: when the joint action is off
// target, every agent's reward becomes the target-action mean, minus the
// margin eta + (H-h) * range_i for the agents that themselves deviated.
void eta_gap_rewrite(const MarkovGameSpec& spec, int h, int s, int joint,
                     const DeterministicJointPolicy& target, double eta,
                     std::span<const double> range_per_agent,
                     std::span<double> rewards);

// White-box action poisoning. Requires Condition 1; the constructor runs the
// check and derives the fallback policy, throwing ConditionViolated when the
// target does not qualify.
class DPortionAttack : public AttackHooks {
 public:
  DPortionAttack(const MarkovGameSpec& spec, DeterministicJointPolicy target);

  int on_actions(int h, int s, int joint_action, Rng& rng) override;
  const DeterministicJointPolicy* current_target() const override {
    return &target_;
  }
  const DeterministicJointPolicy& fallback() const { return worse_; }
  MarkovAttackModel markov_model() const;

 private:
  const MarkovGameSpec* spec_;
  DeterministicJointPolicy target_;
  DeterministicJointPolicy worse_;
};

// White-box reward poisoning. Requires Condition 2 at the given eta.
class EtaGapAttack : public AttackHooks {
 public:
  EtaGapAttack(const MarkovGameSpec& spec, DeterministicJointPolicy target,
               double eta);

  void on_rewards(int h, int s, int pre_action, int post_action,
                  std::span<const double> env_rewards,
                  std::span<double> observed) override;
  const DeterministicJointPolicy* current_target() const override {
    return &target_;
  }
  double eta() const { return eta_; }
  MarkovAttackModel markov_model() const;

 private:
  const MarkovGameSpec* spec_;
  DeterministicJointPolicy target_;
  double eta_;
  std::vector<double> range_per_agent_;
};

// Gray-box mixed attack: per agent, a deviating action is forced to the
// target component and its reward is zeroed; on-target agents are left
// alone. The environment therefore always receives the target joint action.
class MixedAttack : public AttackHooks {
 public:
  MixedAttack(const MarkovGameSpec& spec, DeterministicJointPolicy target);

  int on_actions(int h, int s, int joint_action, Rng& rng) override;
  void on_rewards(int h, int s, int pre_action, int post_action,
                  std::span<const double> env_rewards,
                  std::span<double> observed) override;
  const DeterministicJointPolicy* current_target() const override {
    return &target_;
  }
  MarkovAttackModel markov_model() const;

 private:
  const MarkovGameSpec* spec_;
  DeterministicJointPolicy target_;
};

// Baseline reward-only attack that replaces every reward of an off-target
// joint action with the target-action mean. It erases the agents' incentive
// gradient instead of creating one toward the target; with rewards capped at
// [0,1] its cost stays linear on games where Condition 2 fails.
class TargetMeanRewardAttack : public AttackHooks {
 public:
  TargetMeanRewardAttack(const MarkovGameSpec& spec,
                         DeterministicJointPolicy target);

  void on_rewards(int h, int s, int pre_action, int post_action,
                  std::span<const double> env_rewards,
                  std::span<double> observed) override;
  const DeterministicJointPolicy* current_target() const override {
    return &target_;
  }
  MarkovAttackModel markov_model() const;

 private:
  const MarkovGameSpec* spec_;
  DeterministicJointPolicy target_;
};

// min over (i, h, s) of R_{i,h}(s, target(s)): the equilibrium margin the
// mixed attack induces.
double min_target_reward(const MarkovGameSpec& spec,
                         const DeterministicJointPolicy& target);

}  // namespace mga
