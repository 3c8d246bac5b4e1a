#pragma once

// Brute-force oracles for the DP operations, written independently of the
// library's backward-induction path: values come from explicit enumeration
// of whole trajectories, best responses from enumeration of whole policies.

#include <vector>

#include "mga/rng.hpp"
#include "mga/types.hpp"

namespace oracle {

// Expected return of `agent` from (h, s) under a product policy, by
// recursive enumeration of every (action, next state) branch.
inline double value_from(const mga::MarkovGameSpec& spec,
                         const mga::ProductPolicy& pi, int agent, int h,
                         int s) {
  if (h >= spec.horizon) return 0.0;
  const int A = spec.num_joint_actions();
  double total = 0.0;
  for (int a = 0; a < A; ++a) {
    double pa = pi.joint_prob(spec, h, s, a);
    if (pa == 0.0) continue;
    double branch = spec.reward(agent, h, s, a);
    if (h + 1 < spec.horizon) {
      auto row = spec.transition_row(h, s, a);
      for (int sp = 0; sp < spec.num_states; ++sp) {
        if (row[sp] == 0.0) continue;
        branch += row[sp] * value_from(spec, pi, agent, h + 1, sp);
      }
    }
    total += pa * branch;
  }
  return total;
}

// All deterministic own-policies of one agent, as flat (h*S+s) -> action
// tables.
inline std::vector<std::vector<int>> enumerate_own_policies(
    const mga::MarkovGameSpec& spec, int agent) {
  const int cells = spec.horizon * spec.num_states;
  const int Ai = spec.actions_per_agent[agent];
  std::vector<std::vector<int>> out;
  std::vector<int> cur(cells, 0);
  while (true) {
    out.push_back(cur);
    int c = 0;
    while (c < cells) {
      if (++cur[c] < Ai) break;
      cur[c] = 0;
      ++c;
    }
    if (c == cells) break;
  }
  return out;
}

inline mga::ProductPolicy with_own_policy(const mga::MarkovGameSpec& spec,
                                          const mga::ProductPolicy& others,
                                          int agent,
                                          const std::vector<int>& own) {
  mga::ProductPolicy pi = others;
  for (int h = 0; h < spec.horizon; ++h) {
    for (int s = 0; s < spec.num_states; ++s) {
      for (int ai = 0; ai < spec.actions_per_agent[agent]; ++ai) {
        pi.set(agent, h, s, ai, 0.0);
      }
      pi.set(agent, h, s, own[h * spec.num_states + s], 1.0);
    }
  }
  return pi;
}

// Best-response value of `agent` at (h=0, s) by exhaustive enumeration of
// all of its deterministic policies against the fixed others.
inline double best_response_value(const mga::MarkovGameSpec& spec, int agent,
                                  const mga::ProductPolicy& others, int s) {
  double best = -1e300;
  for (const auto& own : enumerate_own_policies(spec, agent)) {
    mga::ProductPolicy pi = with_own_policy(spec, others, agent, own);
    best = std::max(best, value_from(spec, pi, agent, 0, s));
  }
  return best;
}

// Small random episodic games for property tests.
inline mga::MarkovGameSpec random_spec(mga::Rng& rng, int max_states = 3,
                                       int max_actions = 2, int max_agents = 2,
                                       int max_horizon = 2) {
  auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(mga::uniform01(rng) * (hi - lo + 1e-12));
  };
  mga::MarkovGameSpec spec;
  spec.num_agents = pick(1, max_agents);
  spec.num_states = pick(1, max_states);
  spec.horizon = pick(1, max_horizon);
  spec.actions_per_agent.resize(spec.num_agents);
  for (int i = 0; i < spec.num_agents; ++i) {
    spec.actions_per_agent[i] = pick(1, max_actions);
  }
  const int S = spec.num_states;
  const int A = spec.num_joint_actions();

  auto random_dist = [&](double* out, int n) {
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      out[k] = -std::log(1.0 - mga::uniform01(rng));
      sum += out[k];
    }
    for (int k = 0; k < n; ++k) out[k] /= sum;
  };

  spec.initial_dist.resize(S);
  random_dist(spec.initial_dist.data(), S);
  spec.transitions.resize(static_cast<std::size_t>(spec.horizon - 1) * S * A *
                          S);
  for (std::size_t row = 0; row + 1 <= spec.transitions.size() / S; ++row) {
    random_dist(spec.transitions.data() + row * S, S);
  }
  spec.mean_rewards.resize(static_cast<std::size_t>(spec.num_agents) *
                           spec.horizon * S * A);
  for (double& r : spec.mean_rewards) r = mga::uniform01(rng);
  return spec;
}

// Random stochastic product policy matching a spec's shape.
inline mga::ProductPolicy random_policy(const mga::MarkovGameSpec& spec,
                                        mga::Rng& rng) {
  mga::ProductPolicy pi = mga::ProductPolicy::uniform(spec);
  for (int h = 0; h < spec.horizon; ++h) {
    for (int s = 0; s < spec.num_states; ++s) {
      for (int i = 0; i < spec.num_agents; ++i) {
        auto d = pi.dist(i, h, s);
        double sum = 0.0;
        for (auto& p : d) {
          p = 0.05 + mga::uniform01(rng);
          sum += p;
        }
        for (auto& p : d) p /= sum;
      }
    }
  }
  return pi;
}

}  // namespace oracle
