#include "mga/fixtures.hpp"

#include <algorithm>
#include <cmath>

#include "mga/errors.hpp"

namespace mga {
namespace {

// Shared-reward 2x2 stage payoffs indexed by joint action (agent 0 major):
// (C,C), (C,D), (D,C), (D,D).
std::vector<double> stage(double dd) { return {1.0, 0.5, 0.5, dd}; }

void fill_rewards(MarkovGameSpec& spec,
                  const std::vector<std::vector<double>>& per_state) {
  const int S = spec.num_states;
  const int A = spec.num_joint_actions();
  spec.mean_rewards.assign(
      static_cast<std::size_t>(spec.num_agents) * spec.horizon * S * A, 0.0);
  for (int i = 0; i < spec.num_agents; ++i) {
    for (int h = 0; h < spec.horizon; ++h) {
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
          spec.mean_rewards[((static_cast<std::size_t>(i) * spec.horizon + h) *
                                 S +
                             s) *
                                A +
                            a] = per_state[s][a];
        }
      }
    }
  }
}

}  // namespace

MarkovGameSpec table1_matrix_game(NoiseModel noise) {
  MarkovGameSpec spec;
  spec.num_agents = 2;
  spec.num_states = 1;
  spec.horizon = 1;
  spec.actions_per_agent = {2, 2};
  spec.initial_dist = {1.0};
  spec.noise = noise;
  fill_rewards(spec, {stage(0.1)});
  return spec;
}

MarkovGameSpec case_mg(NoiseModel noise) {
  MarkovGameSpec spec;
  spec.num_agents = 2;
  spec.num_states = 3;
  spec.horizon = 2;
  spec.actions_per_agent = {2, 2};
  spec.initial_dist = {1.0, 0.0, 0.0};
  spec.noise = noise;
  fill_rewards(spec, {stage(0.2), stage(0.1), stage(0.9)});

  const int S = 3, A = 4, DD = 3;
  spec.transitions.assign(static_cast<std::size_t>(1) * S * A * S, 0.0);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      double to_s1 = (a == DD) ? 0.9 : 0.1;
      spec.transitions[((static_cast<std::size_t>(0) * S + s) * A + a) * S +
                       1] = to_s1;
      spec.transitions[((static_cast<std::size_t>(0) * S + s) * A + a) * S +
                       2] = 1.0 - to_s1;
    }
  }
  return spec;
}

DeterministicJointPolicy case1_target() {
  DeterministicJointPolicy pi;
  pi.horizon = 2;
  pi.num_states = 3;
  pi.joint.assign(6, 3);  // (D,D) everywhere
  return pi;
}

DeterministicJointPolicy case2_target() {
  DeterministicJointPolicy pi;
  pi.horizon = 2;
  pi.num_states = 3;
  pi.joint = {0, 0, 3, 0, 0, 3};  // cooperate at s0/s1, defect at s2
  return pi;
}

MarkovGameSpec recycling_robots(NoiseModel noise) {
  MarkovGameSpec spec;
  spec.num_agents = 3;
  spec.num_states = 8;
  spec.horizon = 6;
  spec.actions_per_agent = {2, 2, 2};
  spec.initial_dist.assign(8, 0.0);
  spec.initial_dist[0] = 1.0;  // everyone at high energy
  spec.noise = noise;

  const int m = 3, S = 8, A = 8, H = 6;
  auto low = [](int s, int r) { return (s >> r) & 1; };
  auto searches = [&](int s, int a, int r) {
    return !low(s, r) && ((a >> (m - 1 - r)) & 1);  // high energy + aggressive
  };

  spec.mean_rewards.assign(static_cast<std::size_t>(m) * H * S * A, 0.0);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      int n_search = 0;
      for (int r = 0; r < m; ++r) n_search += searches(s, a, r);
      for (int r = 0; r < m; ++r) {
        int own = (a >> (m - 1 - r)) & 1;
        double mean;
        if (!low(s, r)) {
          // Lone searchers would exceed the reward cap; clip at 1.
          mean = own ? std::min(1.0, 0.2 + 0.9 / n_search) : 0.4;
        } else {
          mean = own ? 0.2 : 0.3;
        }
        for (int h = 0; h < H; ++h) {
          spec.mean_rewards[((static_cast<std::size_t>(r) * H + h) * S + s) *
                                A +
                            a] = mean;
        }
      }
    }
  }

  spec.transitions.assign(static_cast<std::size_t>(H - 1) * S * A * S, 0.0);
  for (int h = 0; h + 1 < H; ++h) {
    double p_drop = (h < 3) ? 0.3 : 0.7;  // search drains faster at night
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        // Robots evolve independently; accumulate the product distribution.
        for (int sp = 0; sp < S; ++sp) {
          double p = 1.0;
          for (int r = 0; r < m; ++r) {
            int own = (a >> (m - 1 - r)) & 1;
            int from_low = low(s, r), to_low = low(sp, r);
            double p_r;
            if (!from_low) {
              if (own) {
                p_r = to_low ? p_drop : 1.0 - p_drop;  // searching may drain
              } else {
                p_r = to_low ? 0.0 : 1.0;  // waiting holds the charge
              }
            } else {
              if (own) {
                p_r = to_low ? 0.0 : 1.0;  // returning swaps the battery
              } else {
                p_r = to_low ? 1.0 : 0.0;  // waiting stays low
              }
            }
            p *= p_r;
            if (p == 0.0) break;
          }
          spec.transitions[((static_cast<std::size_t>(h) * S + s) * A + a) *
                               S +
                           sp] = p;
        }
      }
    }
  }
  return spec;
}

std::vector<double> agent_reward_tensor(const MarkovGameSpec& spec,
                                        int agent) {
  const int S = spec.num_states;
  const int A = spec.num_joint_actions();
  std::vector<double> out(static_cast<std::size_t>(spec.horizon) * S * A);
  for (int h = 0; h < spec.horizon; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        out[(static_cast<std::size_t>(h) * S + s) * A + a] =
            spec.reward(agent, h, s, a);
      }
    }
  }
  return out;
}

std::vector<double> recycling_reward_r1() {
  return agent_reward_tensor(recycling_robots(), 0);
}

std::vector<double> recycling_reward_anti23() {
  MarkovGameSpec spec = recycling_robots();
  const int S = spec.num_states;
  const int A = spec.num_joint_actions();
  std::vector<double> out(static_cast<std::size_t>(spec.horizon) * S * A);
  for (int h = 0; h < spec.horizon; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        out[(static_cast<std::size_t>(h) * S + s) * A + a] =
            1.0 - spec.reward(1, h, s, a) / 2.0 - spec.reward(2, h, s, a) / 2.0;
      }
    }
  }
  return out;
}

MarkovGameSpec fixture_by_name(const std::string& name, NoiseModel noise) {
  if (name == "table1") return table1_matrix_game(noise);
  if (name == "case_mg") return case_mg(noise);
  if (name == "recycling_robots") return recycling_robots(noise);
  throw ConfigError("unknown fixture '" + name + "'");
}

std::vector<std::string> fixture_names() {
  return {"table1", "case_mg", "recycling_robots"};
}

}  // namespace mga
