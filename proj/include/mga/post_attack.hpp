#pragma once

#include <vector>

#include "mga/types.hpp"

namespace mga {

// A Markov attack reduced to data: a per-(h, s, a) mixing matrix over
// post-attack joint actions, plus an optional deterministic reward override
// per (agent, h, s, a). NaN in the override means "pass the realized reward
// for the post-attack action through untouched".
struct MarkovAttackModel {
  int horizon = 0;
  int num_states = 0;
  int num_joint_actions = 0;
  int num_agents = 0;
  std::vector<double> action_mix;      // ((h*S+s)*A + a)*A + a'
  std::vector<double> reward_override; // ((i*H+h)*S+s)*A + a, NaN = passthrough

  static MarkovAttackModel identity(const MarkovGameSpec& spec);

  double mix(int h, int s, int a, int ap) const {
    return action_mix[((static_cast<std::size_t>(h) * num_states + s) *
                           num_joint_actions +
                       a) *
                          num_joint_actions +
                      ap];
  }
  double& mix(int h, int s, int a, int ap) {
    return action_mix[((static_cast<std::size_t>(h) * num_states + s) *
                           num_joint_actions +
                       a) *
                          num_joint_actions +
                      ap];
  }
  double override_at(int i, int h, int s, int a) const {
    return reward_override[((static_cast<std::size_t>(i) * horizon + h) *
                                num_states +
                            s) *
                               num_joint_actions +
                           a];
  }
  double& override_at(int i, int h, int s, int a) {
    return reward_override[((static_cast<std::size_t>(i) * horizon + h) *
                                num_states +
                            s) *
                               num_joint_actions +
                           a];
  }
};

// The environment the agents effectively face under a Markov attack:
//   P~_h(s'|s,a) = sum_{a'} mix_h(a'|s,a) P_h(s'|s,a')
//   R~_{i,h}(s,a) = override, or sum_{a'} mix_h(a'|s,a) R_{i,h}(s,a').
// The result passes validate_spec; an identity model returns the spec
// bit-for-bit.
MarkovGameSpec post_attack_env(const MarkovGameSpec& spec,
                               const MarkovAttackModel& attack);

}  // namespace mga
