#include "mga/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace mga {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Worse action at one (h, s) under the already-evaluated target tables:
// argmax_a min_i [V_i(s) - Q_i(s, a)] subject to every agent's gap > 0.
// Returns -1 when no action qualifies.
int worse_action_at(const MarkovGameSpec& spec, const ValueTables& vt, int h,
                    int s, double* best_gap_out) {
  const int A = spec.num_joint_actions();
  int best_a = -1;
  double best_gap = -kInf;
  for (int a = 0; a < A; ++a) {
    double min_gap = kInf;
    for (int i = 0; i < spec.num_agents; ++i) {
      min_gap = std::min(min_gap, vt.value(i, h, s) - vt.qvalue(i, h, s, a));
    }
    if (min_gap > 0.0 && min_gap > best_gap) {
      best_gap = min_gap;
      best_a = a;
    }
  }
  if (best_gap_out) *best_gap_out = best_gap;
  return best_a;
}

std::string hs_message(const char* what, int h, int s) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%s at (h=%d, s=%d)", what, h, s);
  return buf;
}

}  // namespace

Condition1Report check_condition1(const MarkovGameSpec& spec,
                                  const DeterministicJointPolicy& target) {
  require_valid(spec);
  ValueTables vt = evaluate_policy(spec, target);
  const int S = spec.num_states;
  const int H = spec.horizon;

  Condition1Report rep;
  rep.delta_min = kInf;
  // Per-step extremes of the target-vs-worse gap, for the dominance check.
  std::vector<double> step_min(H, kInf), step_max(H, -kInf);

  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      int a = worse_action_at(spec, vt, h, s, nullptr);
      if (a < 0) {
        rep.violations.push_back(
            {h, s, hs_message("no uniformly worse action", h, s)});
        continue;
      }
      for (int i = 0; i < spec.num_agents; ++i) {
        double gap = vt.value(i, h, s) - vt.qvalue(i, h, s, a);
        rep.delta_min = std::min(rep.delta_min, gap);
        step_min[h] = std::min(step_min[h], gap);
        step_max[h] = std::max(step_max[h], gap);
      }
    }
  }
  rep.holds = rep.violations.empty();

  if (rep.holds) {
    rep.step_dominance = true;
    for (int h = 0; h < H; ++h) {
      double later = 0.0;
      for (int hp = h + 1; hp < H; ++hp) later += step_max[hp];
      if (step_min[h] < later) rep.step_dominance = false;
    }
  }
  return rep;
}

Condition2Report check_condition2(const MarkovGameSpec& spec,
                                  const DeterministicJointPolicy& target,
                                  double eta) {
  require_valid(spec);
  if (!(eta > 0.0)) throw SpecError("condition 2 requires eta > 0");
  const int S = spec.num_states;
  const int H = spec.horizon;
  const int A = spec.num_joint_actions();
  const int m = spec.num_agents;

  Condition2Report rep;
  rep.delta_r_per_agent.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double lo = kInf, hi = -kInf;
    for (int h = 0; h < H; ++h) {
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
          double r = spec.reward(i, h, s, a);
          lo = std::min(lo, r);
          hi = std::max(hi, r);
        }
      }
    }
    rep.delta_r_per_agent[i] = hi - lo;
    rep.delta_r = std::max(rep.delta_r, hi - lo);
  }

  // (h, s) pairs outside the forward closure of P0 never occur in play, so
  // the per-step reward constraint is only meaningful inside it.
  std::vector<char> reach = reachable_under_any(spec);

  rep.eta_max = kInf;
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      if (!reach[static_cast<std::size_t>(h) * S + s]) continue;
      int a_target = target.at(h, s);
      int steps_left = H - 1 - h;
      for (int i = 0; i < m; ++i) {
        double r = spec.reward(i, h, s, a_target);
        // Largest eta keeping (r - eta)/(H-h) >= range_i; at the final step
        // the divisor vanishes and only r - eta >= 0 remains.
        double cap = r - steps_left * rep.delta_r_per_agent[i];
        rep.eta_max = std::min(rep.eta_max, cap);
        if (r - eta < steps_left * rep.delta_r_per_agent[i]) {
          char buf[128];
          std::snprintf(buf, sizeof(buf),
                        "agent %d margin %.6g below %.6g at (h=%d, s=%d)", i,
                        r - eta, steps_left * rep.delta_r_per_agent[i], h, s);
          rep.violations.push_back({h, s, buf});
        }
      }
    }
  }
  rep.holds = rep.violations.empty();
  return rep;
}

DeterministicJointPolicy worse_policy(const MarkovGameSpec& spec,
                                      const DeterministicJointPolicy& target) {
  require_valid(spec);
  ValueTables vt = evaluate_policy(spec, target);
  DeterministicJointPolicy out;
  out.horizon = spec.horizon;
  out.num_states = spec.num_states;
  out.joint.assign(static_cast<std::size_t>(spec.horizon) * spec.num_states,
                   0);
  for (int h = 0; h < spec.horizon; ++h) {
    for (int s = 0; s < spec.num_states; ++s) {
      int a = worse_action_at(spec, vt, h, s, nullptr);
      if (a < 0) {
        throw ConditionViolated(
            h, s, hs_message("no uniformly worse action", h, s));
      }
      out.at(h, s) = a;
    }
  }
  return out;
}

}  // namespace mga
