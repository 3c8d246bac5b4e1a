#include "mga/simulate.hpp"

namespace mga {

Trajectory sample_episode(const MarkovGameSpec& spec, BehaviorSource& behavior,
                          AttackHooks* hooks, Rng& rng,
                          std::span<const double> attacker_reward) {
  const int S = spec.num_states;
  const int A = spec.num_joint_actions();
  const int m = spec.num_agents;
  if (!attacker_reward.empty() &&
      attacker_reward.size() !=
          static_cast<std::size_t>(spec.horizon) * S * A) {
    throw SpecError("attacker reward tensor size mismatch");
  }

  Trajectory traj;
  traj.steps.resize(spec.horizon);

  int s = sample_categorical(spec.initial_dist, rng);
  for (int h = 0; h < spec.horizon; ++h) {
    StepRecord& rec = traj.steps[h];
    rec.state = s;
    rec.pre_action = behavior.act(h, s, rng);
    rec.post_action =
        hooks ? hooks->on_actions(h, s, rec.pre_action, rng) : rec.pre_action;
    if (rec.post_action < 0 || rec.post_action >= A) {
      throw SpecError("attack produced an invalid joint action");
    }

    rec.env_rewards.resize(m);
    for (int i = 0; i < m; ++i) {
      rec.env_rewards[i] =
          draw_reward(spec.reward(i, h, s, rec.post_action), spec.noise, rng);
    }
    if (!attacker_reward.empty()) {
      double mean =
          attacker_reward[(static_cast<std::size_t>(h) * S + s) * A +
                          rec.post_action];
      rec.attacker_reward = draw_reward(mean, spec.noise, rng);
      rec.has_attacker_reward = true;
    }
    rec.next_state =
        h + 1 < spec.horizon
            ? sample_categorical(spec.transition_row(h, s, rec.post_action),
                                 rng)
            : -1;

    rec.observed_rewards = rec.env_rewards;
    if (hooks) {
      hooks->on_rewards(h, s, rec.pre_action, rec.post_action,
                        rec.env_rewards, rec.observed_rewards);
      for (double r : rec.observed_rewards) {
        if (!(r >= 0.0 && r <= 1.0)) {
          throw SpecError("attack produced a reward outside [0,1]");
        }
      }
      hooks->on_step(h, rec);
    }
    behavior.observe(h, s, rec.pre_action, rec.observed_rewards,
                     rec.next_state);
    s = rec.next_state;
  }
  return traj;
}

}  // namespace mga
