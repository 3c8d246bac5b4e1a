#include "mga/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mga {
namespace {

ValueTables make_tables(const MarkovGameSpec& spec, int num_agents) {
  ValueTables t;
  t.num_agents = num_agents;
  t.horizon = spec.horizon;
  t.num_states = spec.num_states;
  t.num_joint_actions = spec.num_joint_actions();
  t.v.assign(static_cast<std::size_t>(num_agents) * spec.horizon *
                 spec.num_states,
             0.0);
  t.q.assign(static_cast<std::size_t>(num_agents) * spec.horizon *
                 spec.num_states * t.num_joint_actions,
             0.0);
  return t;
}

// Expected next-step value of taking joint action a at (h, s).
inline double continuation(const MarkovGameSpec& spec,
                           std::span<const double> v_next, int h, int s,
                           int a) {
  if (h + 1 >= spec.horizon) return 0.0;
  auto row = spec.transition_row(h, s, a);
  double e = 0.0;
  for (int sp = 0; sp < spec.num_states; ++sp) e += row[sp] * v_next[sp];
  return e;
}

}  // namespace

ValueTables evaluate_policy(const MarkovGameSpec& spec,
                            const ProductPolicy& pi) {
  ValidationReport rep = validate_policy(spec, pi);
  if (!rep.ok) throw SpecError(rep.message);

  const int S = spec.num_states;
  const int A = spec.num_joint_actions();
  const int m = spec.num_agents;
  ValueTables out = make_tables(spec, m);

  std::vector<double> joint_probs(A);
  for (int h = spec.horizon - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) joint_probs[a] = pi.joint_prob(spec, h, s, a);
      for (int i = 0; i < m; ++i) {
        std::span<const double> v_next =
            h + 1 < spec.horizon
                ? std::span<const double>(
                      out.v.data() +
                          (static_cast<std::size_t>(i) * spec.horizon + h + 1) *
                              S,
                      S)
                : std::span<const double>();
        double v = 0.0;
        for (int a = 0; a < A; ++a) {
          double q = spec.reward(i, h, s, a) +
                     continuation(spec, v_next, h, s, a);
          out.qvalue(i, h, s, a) = q;
          v += joint_probs[a] * q;
        }
        out.value(i, h, s) = v;
      }
    }
  }
  return out;
}

ValueTables evaluate_policy(const MarkovGameSpec& spec,
                            const DeterministicJointPolicy& pi) {
  if (pi.horizon != spec.horizon || pi.num_states != spec.num_states) {
    throw SpecError("deterministic policy shape mismatch");
  }
  const int S = spec.num_states;
  const int A = spec.num_joint_actions();
  const int m = spec.num_agents;
  for (int hs = 0; hs < spec.horizon * S; ++hs) {
    if (pi.joint[hs] < 0 || pi.joint[hs] >= A) {
      throw SpecError("deterministic policy has an invalid joint action");
    }
  }
  ValueTables out = make_tables(spec, m);
  for (int h = spec.horizon - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      for (int i = 0; i < m; ++i) {
        std::span<const double> v_next =
            h + 1 < spec.horizon
                ? std::span<const double>(
                      out.v.data() +
                          (static_cast<std::size_t>(i) * spec.horizon + h + 1) *
                              S,
                      S)
                : std::span<const double>();
        for (int a = 0; a < A; ++a) {
          out.qvalue(i, h, s, a) = spec.reward(i, h, s, a) +
                                   continuation(spec, v_next, h, s, a);
        }
        out.value(i, h, s) = out.qvalue(i, h, s, pi.at(h, s));
      }
    }
  }
  return out;
}

BestResponseResult best_response(const MarkovGameSpec& spec, int agent,
                                 const ProductPolicy& others) {
  ValidationReport rep = validate_policy(spec, others);
  if (!rep.ok) throw SpecError(rep.message);
  if (agent < 0 || agent >= spec.num_agents) throw SpecError("bad agent index");

  const int S = spec.num_states;
  const int A = spec.num_joint_actions();
  const int Ai = spec.actions_per_agent[agent];

  BestResponseResult out;
  out.actions.assign(static_cast<std::size_t>(spec.horizon) * S, 0);
  out.values = make_tables(spec, 1);

  std::vector<double> own_q(Ai);
  for (int h = spec.horizon - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      std::span<const double> v_next =
          h + 1 < spec.horizon
              ? std::span<const double>(
                    out.values.v.data() +
                        static_cast<std::size_t>(h + 1) * S,
                    S)
              : std::span<const double>();
      std::fill(own_q.begin(), own_q.end(), 0.0);
      for (int a = 0; a < A; ++a) {
        double q = spec.reward(agent, h, s, a) +
                   continuation(spec, v_next, h, s, a);
        out.values.qvalue(0, h, s, a) = q;
        // Marginalize the other agents out.
        double p_others = 1.0;
        for (int j = 0; j < spec.num_agents; ++j) {
          if (j == agent) continue;
          p_others *= others.get(j, h, s, spec.agent_action(a, j));
        }
        own_q[spec.agent_action(a, agent)] += p_others * q;
      }
      int best = 0;
      for (int ai = 1; ai < Ai; ++ai) {
        if (own_q[ai] > own_q[best]) best = ai;  // ties keep the lowest index
      }
      out.actions[h * S + s] = best;
      out.values.value(0, h, s) = own_q[best];
    }
  }
  return out;
}

std::vector<double> ne_gap(const MarkovGameSpec& spec,
                           const ProductPolicy& pi) {
  ValueTables under_pi = evaluate_policy(spec, pi);
  std::vector<double> gap(spec.num_states,
                          -std::numeric_limits<double>::infinity());
  for (int i = 0; i < spec.num_agents; ++i) {
    BestResponseResult br = best_response(spec, i, pi);
    for (int s = 0; s < spec.num_states; ++s) {
      gap[s] = std::max(gap[s],
                        br.values.value(0, 0, s) - under_pi.value(i, 0, s));
    }
  }
  return gap;
}

JointOptimum joint_optimum(const MarkovGameSpec& spec,
                           std::span<const double> reward) {
  const int S = spec.num_states;
  const int A = spec.num_joint_actions();
  if (reward.size() != static_cast<std::size_t>(spec.horizon) * S * A) {
    throw SpecError("reward tensor size mismatch");
  }
  JointOptimum out;
  out.policy.horizon = spec.horizon;
  out.policy.num_states = S;
  out.policy.joint.assign(static_cast<std::size_t>(spec.horizon) * S, 0);
  out.values.assign(static_cast<std::size_t>(spec.horizon) * S, 0.0);

  for (int h = spec.horizon - 1; h >= 0; --h) {
    std::span<const double> v_next =
        h + 1 < spec.horizon
            ? std::span<const double>(out.values.data() +
                                          static_cast<std::size_t>(h + 1) * S,
                                      S)
            : std::span<const double>();
    for (int s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      int best_a = 0;
      for (int a = 0; a < A; ++a) {
        double q = reward[(static_cast<std::size_t>(h) * S + s) * A + a] +
                   continuation(spec, v_next, h, s, a);
        if (q > best) {
          best = q;
          best_a = a;
        }
      }
      out.values[static_cast<std::size_t>(h) * S + s] = best;
      out.policy.at(h, s) = best_a;
    }
  }
  return out;
}

std::vector<double> evaluate_under_reward(const MarkovGameSpec& spec,
                                          const ProductPolicy& pi,
                                          std::span<const double> reward) {
  const int S = spec.num_states;
  const int A = spec.num_joint_actions();
  if (reward.size() != static_cast<std::size_t>(spec.horizon) * S * A) {
    throw SpecError("reward tensor size mismatch");
  }
  std::vector<double> v(static_cast<std::size_t>(spec.horizon) * S, 0.0);
  for (int h = spec.horizon - 1; h >= 0; --h) {
    std::span<const double> v_next =
        h + 1 < spec.horizon
            ? std::span<const double>(
                  v.data() + static_cast<std::size_t>(h + 1) * S, S)
            : std::span<const double>();
    for (int s = 0; s < S; ++s) {
      double val = 0.0;
      for (int a = 0; a < A; ++a) {
        double p = pi.joint_prob(spec, h, s, a);
        if (p == 0.0) continue;
        val += p * (reward[(static_cast<std::size_t>(h) * S + s) * A + a] +
                    continuation(spec, v_next, h, s, a));
      }
      v[static_cast<std::size_t>(h) * S + s] = val;
    }
  }
  return v;
}

std::vector<double> evaluate_under_reward(const MarkovGameSpec& spec,
                                          const DeterministicJointPolicy& pi,
                                          std::span<const double> reward) {
  const int S = spec.num_states;
  const int A = spec.num_joint_actions();
  std::vector<double> v(static_cast<std::size_t>(spec.horizon) * S, 0.0);
  for (int h = spec.horizon - 1; h >= 0; --h) {
    std::span<const double> v_next =
        h + 1 < spec.horizon
            ? std::span<const double>(
                  v.data() + static_cast<std::size_t>(h + 1) * S, S)
            : std::span<const double>();
    for (int s = 0; s < S; ++s) {
      int a = pi.at(h, s);
      v[static_cast<std::size_t>(h) * S + s] =
          reward[(static_cast<std::size_t>(h) * S + s) * A + a] +
          continuation(spec, v_next, h, s, a);
    }
  }
  return v;
}

std::vector<char> reachable_under_any(const MarkovGameSpec& spec) {
  const int S = spec.num_states;
  const int A = spec.num_joint_actions();
  std::vector<char> reach(static_cast<std::size_t>(spec.horizon) * S, 0);
  for (int s = 0; s < S; ++s) reach[s] = spec.initial_dist[s] > 0.0;
  for (int h = 0; h + 1 < spec.horizon; ++h) {
    for (int s = 0; s < S; ++s) {
      if (!reach[static_cast<std::size_t>(h) * S + s]) continue;
      for (int a = 0; a < A; ++a) {
        auto row = spec.transition_row(h, s, a);
        for (int sp = 0; sp < S; ++sp) {
          if (row[sp] > 0.0) reach[static_cast<std::size_t>(h + 1) * S + sp] = 1;
        }
      }
    }
  }
  return reach;
}

std::vector<double> visit_probabilities(const MarkovGameSpec& spec,
                                        const DeterministicJointPolicy& pi) {
  const int S = spec.num_states;
  std::vector<double> visit(static_cast<std::size_t>(spec.horizon) * S, 0.0);
  for (int s = 0; s < S; ++s) visit[s] = spec.initial_dist[s];
  for (int h = 0; h + 1 < spec.horizon; ++h) {
    for (int s = 0; s < S; ++s) {
      double p = visit[static_cast<std::size_t>(h) * S + s];
      if (p == 0.0) continue;
      auto row = spec.transition_row(h, s, pi.at(h, s));
      for (int sp = 0; sp < S; ++sp) {
        visit[static_cast<std::size_t>(h + 1) * S + sp] += p * row[sp];
      }
    }
  }
  return visit;
}

}  // namespace mga
