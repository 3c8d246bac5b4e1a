#pragma once

#include <cstdint>
#include <vector>

#include "mga/bandit.hpp"
#include "mga/schedule.hpp"
#include "mga/simulate.hpp"
#include "mga/types.hpp"

namespace mga {

struct VLearningConfig {
  int horizon = 0;
  int num_states = 0;
  int num_actions = 0;  // the agent's own action count
  // Bonus beta_t = beta_c * sqrt(H^3 * A * iota / t); iota is the log term
  // log(m H S A K / delta) supplied by the harness.
  double beta_c = 1.0;
  double iota = 1.0;
};

// One decentralized V-learning agent: optimistic V tables plus one
// adversarial bandit per (step, state) over its own actions. The agent sees
// only its own actions and observed rewards.
class VLearner {
 public:
  explicit VLearner(const VLearningConfig& config);

  int select_action(int h, int s, Rng& rng) {
    return bandit(h, s).sample(rng);
  }

  // Online update after one step: bumps the visit counter, refreshes the
  // optimistic value, and feeds the bandit the normalized loss
  // (H - r - V_{h+1}(s'))/H. `episode` is 1-based and only recorded in the
  // policy archive.
  void step_update(std::int64_t episode, int h, int s, int own_action,
                   double reward, int next_state);

  double value(int h, int s) const {
    return h >= config_.horizon ? 0.0 : v_[index(h, s)];
  }
  std::int64_t visits(int h, int s) const { return visits_[index(h, s)]; }
  const ExpWeightsBandit& bandit(int h, int s) const {
    return bandits_[index(h, s)];
  }
  ExpWeightsBandit& bandit(int h, int s) { return bandits_[index(h, s)]; }

  double beta(std::int64_t t) const;
  const VLearningConfig& config() const { return config_; }

  // Policy snapshots taken at each visit, before that visit's bandit update
  // (the distribution the action was drawn from).
  struct Archive {
    std::vector<std::int64_t> episodes;
    std::vector<double> thetas;  // visits x num_actions, row-major
  };
  const Archive& archive(int h, int s) const { return archive_[index(h, s)]; }

 private:
  std::size_t index(int h, int s) const {
    return static_cast<std::size_t>(h) * config_.num_states + s;
  }

  VLearningConfig config_;
  std::vector<double> v_;
  std::vector<double> v_accum_;  // pre-clip accumulator
  std::vector<std::int64_t> visits_;
  std::vector<ExpWeightsBandit> bandits_;
  std::vector<Archive> archive_;
};

// The m agents of one run wired up as a joint behavior source. The team
// decodes each agent's own action and reward from the joint step and runs
// the per-agent updates in agent order.
class VLearningTeam : public BehaviorSource {
 public:
  VLearningTeam(const MarkovGameSpec& spec, double beta_c, double iota);

  void begin_episode(std::int64_t episode) { episode_ = episode; }

  int act(int h, int s, Rng& rng) override;
  void observe(int h, int s, int joint_pre_action,
               std::span<const double> observed_rewards,
               int next_state) override;

  const VLearner& learner(int i) const { return learners_[i]; }
  VLearner& learner(int i) { return learners_[i]; }
  int size() const { return static_cast<int>(learners_.size()); }

  // Product of the current bandit distributions, i.e. pi^k when queried at
  // an episode boundary.
  ProductPolicy current_policy() const;

  // The executing output policy after `episodes` completed episodes: the
  // alpha-weighted mixture of archived snapshots, averaged over episodes.
  ProductPolicy output_policy(std::int64_t episodes) const;

 private:
  const MarkovGameSpec* spec_;
  std::vector<VLearner> learners_;
  std::vector<int> own_;
  std::int64_t episode_ = 0;
};

}  // namespace mga
