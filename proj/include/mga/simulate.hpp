#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mga/rng.hpp"
#include "mga/types.hpp"

namespace mga {

// One step of an episode with both sides of every manipulation recorded.
struct StepRecord {
  int state = 0;
  int pre_action = 0;    // joint action the agents chose
  int post_action = 0;   // joint action the environment received
  std::vector<double> env_rewards;       // realized, per agent
  std::vector<double> observed_rewards;  // what the agents were shown
  double attacker_reward = 0.0;          // realized r_dagger, if drawn
  bool has_attacker_reward = false;
  int next_state = -1;   // -1 at the final step
};

struct Trajectory {
  std::vector<StepRecord> steps;
  int initial_state() const { return steps.empty() ? -1 : steps[0].state; }
};

// Supplies joint actions and receives the agent-visible side of each step:
// the pre-attack actions and the observed (possibly rewritten) rewards.
// Agents never see post-attack actions or raw environment rewards.
class BehaviorSource {
 public:
  virtual ~BehaviorSource() = default;
  virtual int act(int h, int s, Rng& rng) = 0;
  virtual void observe(int /*h*/, int /*s*/, int /*joint_pre_action*/,
                       std::span<const double> /*observed_rewards*/,
                       int /*next_state*/) {}
};

// Plays a fixed product policy and learns nothing.
class FixedPolicySource : public BehaviorSource {
 public:
  FixedPolicySource(const MarkovGameSpec& spec, ProductPolicy pi)
      : spec_(&spec), pi_(std::move(pi)) {}

  int act(int h, int s, Rng& rng) override {
    own_.resize(spec_->num_agents);
    for (int i = 0; i < spec_->num_agents; ++i) {
      own_[i] = sample_categorical(pi_.dist(i, h, s), rng);
    }
    return spec_->encode_joint(own_);
  }

 private:
  const MarkovGameSpec* spec_;
  ProductPolicy pi_;
  std::vector<int> own_;
};

// The attacker's intercept points. Hooks run with full visibility (the
// attacker may monitor everything); identity defaults leave the run
// untouched. episode_begin/episode_end are driven by the caller loop.
class AttackHooks {
 public:
  virtual ~AttackHooks() = default;
  virtual void episode_begin(std::int64_t /*episode*/) {}
  virtual int on_actions(int /*h*/, int /*s*/, int joint_action, Rng& /*rng*/) {
    return joint_action;
  }
  // env_rewards are the realized rewards for post_action; fills observed.
  virtual void on_rewards(int /*h*/, int /*s*/, int /*pre_action*/,
                          int /*post_action*/,
                          std::span<const double> env_rewards,
                          std::span<double> observed) {
    std::copy(env_rewards.begin(), env_rewards.end(), observed.begin());
  }
  virtual void on_step(int /*h*/, const StepRecord& /*record*/) {}
  virtual void episode_end(const Trajectory& /*trajectory*/) {}
  // Target policy for loss accounting, when the strategy has one.
  virtual const DeterministicJointPolicy* current_target() const {
    return nullptr;
  }
};

// Runs one episode of the interaction protocol. Per step: agents act, the
// action hook may rewrite, the environment draws rewards and the next state
// from the post-attack action, the reward hook may rewrite what the agents
// see. Deterministic given the rng state. attacker_reward, when non-null, is
// an H*S*A tensor of means for the attacker's own reward draw.
Trajectory sample_episode(const MarkovGameSpec& spec, BehaviorSource& behavior,
                          AttackHooks* hooks, Rng& rng,
                          std::span<const double> attacker_reward = {});

}  // namespace mga
