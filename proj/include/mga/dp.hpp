#pragma once

#include <span>
#include <vector>

#include "mga/types.hpp"

namespace mga {

// Exact Bellman evaluation of a product policy: backward from the last step,
//   Q_{i,h}(s,a) = R_{i,h}(s,a) + sum_{s'} P_h(s'|s,a) V_{i,h+1}(s'),
//   V_{i,h}(s)   = E_{a ~ pi_h(.|s)} Q_{i,h}(s,a).
ValueTables evaluate_policy(const MarkovGameSpec& spec,
                            const ProductPolicy& pi);
ValueTables evaluate_policy(const MarkovGameSpec& spec,
                            const DeterministicJointPolicy& pi);

struct BestResponseResult {
  std::vector<int> actions;  // agent's own action per (h, s)
  ValueTables values;        // single-agent slice: num_agents == 1

  int action_at(int h, int s) const {
    return actions[h * values.num_states + s];
  }
};

// Deterministic best response of `agent` against the others' product policy,
// by backward DP over the agent's own actions. Ties break to the lowest
// action index. values.q holds the joint-action Q under the best-response
// continuation; values.v holds V^{+,pi_{-i}}_{i,h}(s).
BestResponseResult best_response(const MarkovGameSpec& spec, int agent,
                                 const ProductPolicy& others);

// Per-initial-state Nash gap of a product policy:
//   gap(s) = max_i [ V^{+,pi_{-i}}_{i,1}(s) - V^{pi}_{i,1}(s) ].
std::vector<double> ne_gap(const MarkovGameSpec& spec,
                           const ProductPolicy& pi);

struct JointOptimum {
  DeterministicJointPolicy policy;
  std::vector<double> values;  // H x S, optimal value-to-go

  double value(int h, int s) const {
    return values[h * policy.num_states + s];
  }
};

// Single-controller optimum over joint actions for an arbitrary H*S*A reward
// tensor (used for the attacker's reward function). Ties break to the lowest
// joint-action index.
JointOptimum joint_optimum(const MarkovGameSpec& spec,
                           std::span<const double> reward);

// Value table (H x S) of a product policy under an arbitrary H*S*A reward
// tensor, on the spec's dynamics.
std::vector<double> evaluate_under_reward(const MarkovGameSpec& spec,
                                          const ProductPolicy& pi,
                                          std::span<const double> reward);
std::vector<double> evaluate_under_reward(const MarkovGameSpec& spec,
                                          const DeterministicJointPolicy& pi,
                                          std::span<const double> reward);

// Visit probabilities per (h, s) under a deterministic joint policy from the
// initial distribution. reachable[h*S+s] == probability > 0.
std::vector<double> visit_probabilities(const MarkovGameSpec& spec,
                                        const DeterministicJointPolicy& pi);

// Forward closure from the initial distribution over all joint actions:
// (h, s) pairs that can occur in play at all.
std::vector<char> reachable_under_any(const MarkovGameSpec& spec);

inline bool is_reachable(const std::vector<double>& visit, int num_states,
                         int h, int s) {
  return visit[h * num_states + s] > 0.0;
}

}  // namespace mga
