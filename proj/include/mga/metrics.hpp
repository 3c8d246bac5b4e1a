#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mga/dp.hpp"
#include "mga/simulate.hpp"
#include "mga/types.hpp"

namespace mga {

struct EpisodeIncrements {
  double cost = 0.0;   // sum over steps/agents of 1(a~ != a) + |r~ - r|
  double loss1 = 0.0;  // count of off-target agent-steps
};

// Increments per the attack-performance definitions. The trajectory must
// carry both sides of every manipulation; `target` may be null (loss1 is 0).
EpisodeIncrements accumulate(const MarkovGameSpec& spec,
                             const Trajectory& trajectory,
                             const DeterministicJointPolicy* target);

// Per-run, per-episode series with checkpointed exact-DP diagnostics held
// piecewise-constant between checkpoints.
class MetricsLog {
 public:
  void add_episode(const EpisodeIncrements& inc);
  void set_loss2(double per_episode_gap) { loss2_current_ = per_episode_gap; }
  void set_regret(double value) { regret_current_ = value; }

  std::int64_t episodes() const { return episodes_; }
  double total_cost() const { return cost_cum_; }
  double total_loss1() const { return loss1_cum_; }
  double total_loss2() const { return loss2_cum_; }
  std::span<const double> cost_increments() const { return cost_inc_; }
  std::span<const double> loss1_increments() const { return loss1_inc_; }
  std::span<const double> loss2_values() const { return loss2_val_; }

  // CSV schema: episode,cost_inc,cost_cum,loss1_inc,loss1_cum,loss2_ckpt,
  // regret_ckpt. Episodes are 1-based; checkpoint columns repeat the latest
  // value and read "nan" before the first checkpoint.
  void write_csv(const std::string& path) const;

 private:
  std::int64_t episodes_ = 0;
  double cost_cum_ = 0.0;
  double loss1_cum_ = 0.0;
  double loss2_cum_ = 0.0;
  double loss2_current_ = std::numeric_limits<double>::quiet_NaN();
  double regret_current_ = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> cost_inc_, loss1_inc_, loss2_val_, regret_val_;
};

// Exact per-episode attacker loss V*(s1) - V^{pi}(s1) under the attacker's
// reward tensor; `optimum` must come from joint_optimum(spec, reward).
double loss2_gap(const MarkovGameSpec& spec, std::span<const double> reward,
                 const JointOptimum& optimum, const ProductPolicy& pi,
                 int initial_state);

// Expected off-target agent-steps per episode under the true dynamics:
// sum_h sum_i P(a_{i,h} != target | pi, P). Shares the policy snapshot with
// loss2_gap so the Loss2 <= H * Loss1 identity is evaluated on one measure.
double expected_loss1(const MarkovGameSpec& spec, const ProductPolicy& pi,
                      const DeterministicJointPolicy& target,
                      int initial_state);

// Best-in-hindsight regret of one agent over a weighted series of policy
// snapshots: max over the agent's deterministic policies of
//   sum_j w_j E_{P0}[ V_i^{pi', pi^j_{-i}} - V_i^{pi^j} ].
// Exhaustive over A_i^(H*S) candidate policies; guarded against blowup.
double hindsight_regret(const MarkovGameSpec& spec,
                        std::span<const ProductPolicy> snapshots,
                        std::span<const double> weights, int agent);

// Incremental form of hindsight_regret for checkpointed runs: snapshots
// stream in with their episode weights and the running regret of any agent
// can be read off at each checkpoint.
class HindsightRegretTracker {
 public:
  explicit HindsightRegretTracker(const MarkovGameSpec& spec);
  void add_snapshot(const ProductPolicy& pi, double weight);
  double current(int agent) const;

 private:
  const MarkovGameSpec* spec_;
  // Per agent: every deterministic own-policy table, flattened h*S+s.
  std::vector<std::vector<std::vector<int>>> candidates_;
  std::vector<std::vector<double>> candidate_sums_;
  std::vector<double> base_;
};

}  // namespace mga
