#include "mga/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mga {
namespace {

void check_policy_shape(const MarkovGameSpec& spec,
                        const DeterministicJointPolicy& pi) {
  if (pi.horizon != spec.horizon || pi.num_states != spec.num_states) {
    throw SpecError("target policy shape mismatch");
  }
  const int A = spec.num_joint_actions();
  for (int v : pi.joint) {
    if (v < 0 || v >= A) throw SpecError("target policy has invalid actions");
  }
}

int agents_on_target(const MarkovGameSpec& spec, int joint, int target) {
  int n = 0;
  for (int i = 0; i < spec.num_agents; ++i) {
    n += spec.agent_action(joint, i) == spec.agent_action(target, i);
  }
  return n;
}

}  // namespace

int d_portion_rewrite(const MarkovGameSpec& spec, int h, int s, int joint,
                      const DeterministicJointPolicy& target,
                      const DeterministicJointPolicy& worse, Rng& rng) {
  int tgt = target.at(h, s);
  if (joint == tgt) return joint;
  double d = spec.num_agents / 2.0 + agents_on_target(spec, joint, tgt) / 2.0;
  return bernoulli(d / spec.num_agents, rng) ? tgt : worse.at(h, s);
}

void eta_gap_rewrite(const MarkovGameSpec& spec, int h, int s, int joint,
                     const DeterministicJointPolicy& target, double eta,
                     std::span<const double> range_per_agent,
                     std::span<double> rewards) {
  int tgt = target.at(h, s);
  if (joint == tgt) return;
  int steps_left = spec.horizon - 1 - h;
  for (int i = 0; i < spec.num_agents; ++i) {
    double r = spec.reward(i, h, s, tgt);
    if (spec.agent_action(joint, i) != spec.agent_action(tgt, i)) {
      r -= eta + steps_left * range_per_agent[i];
    }
    rewards[i] = r;
  }
}

DPortionAttack::DPortionAttack(const MarkovGameSpec& spec,
                               DeterministicJointPolicy target)
    : spec_(&spec), target_(std::move(target)) {
  check_policy_shape(spec, target_);
  worse_ = worse_policy(spec, target_);  // throws when Condition 1 fails
}

int DPortionAttack::on_actions(int h, int s, int joint_action, Rng& rng) {
  return d_portion_rewrite(*spec_, h, s, joint_action, target_, worse_, rng);
}

MarkovAttackModel DPortionAttack::markov_model() const {
  MarkovAttackModel m = MarkovAttackModel::identity(*spec_);
  const int A = spec_->num_joint_actions();
  for (int h = 0; h < spec_->horizon; ++h) {
    for (int s = 0; s < spec_->num_states; ++s) {
      int tgt = target_.at(h, s), wrs = worse_.at(h, s);
      for (int a = 0; a < A; ++a) {
        if (a == tgt) continue;
        double p = (spec_->num_agents / 2.0 +
                    agents_on_target(*spec_, a, tgt) / 2.0) /
                   spec_->num_agents;
        m.mix(h, s, a, a) = 0.0;
        m.mix(h, s, a, tgt) += p;
        m.mix(h, s, a, wrs) += 1.0 - p;
      }
    }
  }
  return m;
}

EtaGapAttack::EtaGapAttack(const MarkovGameSpec& spec,
                           DeterministicJointPolicy target, double eta)
    : spec_(&spec), target_(std::move(target)), eta_(eta) {
  check_policy_shape(spec, target_);
  Condition2Report rep = check_condition2(spec, target_, eta);
  if (!rep.holds) {
    const auto& v = rep.violations.front();
    throw ConditionViolated(v.h, v.s, "eta-gap attack rejected: " + v.what);
  }
  range_per_agent_ = rep.delta_r_per_agent;
}

void EtaGapAttack::on_rewards(int h, int s, int pre_action, int /*post*/,
                              std::span<const double> env_rewards,
                              std::span<double> observed) {
  std::copy(env_rewards.begin(), env_rewards.end(), observed.begin());
  eta_gap_rewrite(*spec_, h, s, pre_action, target_, eta_, range_per_agent_,
                  observed);
  for (double r : observed) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw ConditionViolated(h, s, "eta-gap rewrite left [0,1]");
    }
  }
}

MarkovAttackModel EtaGapAttack::markov_model() const {
  MarkovAttackModel m = MarkovAttackModel::identity(*spec_);
  const int A = spec_->num_joint_actions();
  std::vector<double> rewritten(spec_->num_agents);
  // Condition 2 only guarantees in-range rewrites on (h, s) pairs that can
  // occur in play; the hook never fires elsewhere, so the model leaves the
  // rest untouched.
  std::vector<char> reach = reachable_under_any(*spec_);
  for (int h = 0; h < spec_->horizon; ++h) {
    for (int s = 0; s < spec_->num_states; ++s) {
      if (!reach[static_cast<std::size_t>(h) * spec_->num_states + s]) {
        continue;
      }
      for (int a = 0; a < A; ++a) {
        if (a == target_.at(h, s)) continue;
        eta_gap_rewrite(*spec_, h, s, a, target_, eta_, range_per_agent_,
                        rewritten);
        for (int i = 0; i < spec_->num_agents; ++i) {
          m.override_at(i, h, s, a) = rewritten[i];
        }
      }
    }
  }
  return m;
}

MixedAttack::MixedAttack(const MarkovGameSpec& spec,
                         DeterministicJointPolicy target)
    : spec_(&spec), target_(std::move(target)) {
  check_policy_shape(spec, target_);
}

int MixedAttack::on_actions(int h, int s, int /*joint_action*/, Rng&) {
  // Deviating components are forced onto the target; the rest already match.
  return target_.at(h, s);
}

void MixedAttack::on_rewards(int h, int s, int pre_action, int /*post*/,
                             std::span<const double> env_rewards,
                             std::span<double> observed) {
  int tgt = target_.at(h, s);
  for (int i = 0; i < spec_->num_agents; ++i) {
    bool on_target =
        spec_->agent_action(pre_action, i) == spec_->agent_action(tgt, i);
    observed[i] = on_target ? env_rewards[i] : 0.0;
  }
}

MarkovAttackModel MixedAttack::markov_model() const {
  MarkovAttackModel m = MarkovAttackModel::identity(*spec_);
  const int A = spec_->num_joint_actions();
  for (int h = 0; h < spec_->horizon; ++h) {
    for (int s = 0; s < spec_->num_states; ++s) {
      int tgt = target_.at(h, s);
      for (int a = 0; a < A; ++a) {
        if (a != tgt) {
          m.mix(h, s, a, a) = 0.0;
          m.mix(h, s, a, tgt) = 1.0;
        }
        for (int i = 0; i < spec_->num_agents; ++i) {
          bool on_target =
              spec_->agent_action(a, i) == spec_->agent_action(tgt, i);
          if (!on_target) m.override_at(i, h, s, a) = 0.0;
        }
      }
    }
  }
  return m;
}

TargetMeanRewardAttack::TargetMeanRewardAttack(const MarkovGameSpec& spec,
                                               DeterministicJointPolicy target)
    : spec_(&spec), target_(std::move(target)) {
  check_policy_shape(spec, target_);
}

void TargetMeanRewardAttack::on_rewards(int h, int s, int pre_action,
                                        int /*post*/,
                                        std::span<const double> env_rewards,
                                        std::span<double> observed) {
  int tgt = target_.at(h, s);
  for (int i = 0; i < spec_->num_agents; ++i) {
    observed[i] =
        pre_action == tgt ? env_rewards[i] : spec_->reward(i, h, s, tgt);
  }
}

MarkovAttackModel TargetMeanRewardAttack::markov_model() const {
  MarkovAttackModel m = MarkovAttackModel::identity(*spec_);
  const int A = spec_->num_joint_actions();
  for (int h = 0; h < spec_->horizon; ++h) {
    for (int s = 0; s < spec_->num_states; ++s) {
      int tgt = target_.at(h, s);
      for (int a = 0; a < A; ++a) {
        if (a == tgt) continue;
        for (int i = 0; i < spec_->num_agents; ++i) {
          m.override_at(i, h, s, a) = spec_->reward(i, h, s, tgt);
        }
      }
    }
  }
  return m;
}

double min_target_reward(const MarkovGameSpec& spec,
                         const DeterministicJointPolicy& target) {
  double r_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < spec.num_agents; ++i) {
    for (int h = 0; h < spec.horizon; ++h) {
      for (int s = 0; s < spec.num_states; ++s) {
        r_min = std::min(r_min, spec.reward(i, h, s, target.at(h, s)));
      }
    }
  }
  return r_min;
}

}  // namespace mga
