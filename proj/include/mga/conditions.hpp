#pragma once

#include <string>
#include <vector>

#include "mga/dp.hpp"
#include "mga/types.hpp"

namespace mga {

struct ConditionViolation {
  int h = 0;
  int s = 0;
  std::string what;
};

// Report for the action-poisoning applicability condition: at every (h, s)
// some joint action must be strictly worse than the target for every agent.
struct Condition1Report {
  bool holds = false;
  std::vector<ConditionViolation> violations;
  // min over (i, h, s) of Q(s, target) - Q(s, worse) where the worse action
  // exists; +inf when it exists nowhere.
  double delta_min = 0.0;
  // Whether min_{s,i} gap at step h dominates the summed max gaps of all
  // later steps, for every h (the premise of the cost/loss bound for the
  // action attack).
  bool step_dominance = false;
};

// Report for the reward-poisoning applicability condition. The per-step
// inequality (R_{i,h}(s, target) - eta) / (H - h) >= range_i is checked on
// the (h, s) pairs that can occur in play (the forward closure of P0); at
// the final step it degenerates to R_{i,H}(s, target) - eta >= 0.
struct Condition2Report {
  bool holds = false;
  std::vector<ConditionViolation> violations;
  double delta_r = 0.0;                   // max over agents of reward range
  std::vector<double> delta_r_per_agent;  // max - min of each agent's rewards
  // Largest eta for which the condition would hold (<= 0 means no eta works).
  double eta_max = 0.0;
};

Condition1Report check_condition1(const MarkovGameSpec& spec,
                                  const DeterministicJointPolicy& target);

Condition2Report check_condition2(const MarkovGameSpec& spec,
                                  const DeterministicJointPolicy& target,
                                  double eta);

// The action the d-portion attack substitutes for deviations: per (h, s) the
// joint action maximizing the minimum per-agent value gap, subject to the
// gap being strictly positive for every agent. Ties break to the lowest
// joint-action index. Throws ConditionViolated at the first (h, s) where no
// action qualifies.
DeterministicJointPolicy worse_policy(const MarkovGameSpec& spec,
                                      const DeterministicJointPolicy& target);

}  // namespace mga
