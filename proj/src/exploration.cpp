#include "mga/exploration.hpp"

#include <algorithm>
#include <cmath>

namespace mga {

ExplorationAttack::ExplorationAttack(int num_states, int num_joint_actions,
                                     int horizon, std::int64_t tau,
                                     double delta)
    : num_states_(num_states),
      num_joint_actions_(num_joint_actions),
      horizon_(horizon),
      tau_(tau),
      delta_(delta) {
  if (tau < 1) throw ConfigError("exploration needs tau >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must be in (0,1)");
  log_bonus_ = std::log(2.0 * num_joint_actions * horizon * tau / delta);

  const std::size_t sa =
      static_cast<std::size_t>(horizon) * num_states * num_joint_actions;
  n_sa_.assign(sa, 0);
  n_next_.assign(static_cast<std::size_t>(std::max(horizon - 1, 0)) *
                     num_states * num_joint_actions * num_states,
                 0);
  r_hat_.assign(sa, 0.0);
  q_up_.assign(sa, static_cast<double>(horizon));
  q_lo_.assign(sa, 0.0);
  v_up_.assign(static_cast<std::size_t>(horizon) * num_states,
               static_cast<double>(horizon));
  v_lo_.assign(static_cast<std::size_t>(horizon) * num_states, 0.0);
  n0_.assign(num_states, 0);
  p0_hat_.assign(num_states, 0.0);

  greedy_.horizon = horizon;
  greedy_.num_states = num_states;
  // Never-updated states keep joint action 0 (also what greedy ties give).
  greedy_.joint.assign(static_cast<std::size_t>(horizon) * num_states, 0);
  incumbent_ = greedy_;
}

double ExplorationAttack::bonus(std::int64_t n) const {
  return (horizon_ * std::sqrt(static_cast<double>(num_states_)) + 1.0) *
         std::sqrt(log_bonus_ / (2.0 * n));
}

void ExplorationAttack::refresh_bounds() {
  const int S = num_states_, A = num_joint_actions_;
  for (int h = horizon_ - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        std::int64_t n = n_sa_[sa_index(h, s, a)];
        if (n == 0) continue;  // keeps the optimistic initialization
        double up = r_hat_[sa_index(h, s, a)];
        double lo = up;
        if (h + 1 < horizon_) {
          const std::int64_t* row =
              n_next_.data() + sa_index(h, s, a) * S;
          double eu = 0.0, el = 0.0;
          for (int sp = 0; sp < S; ++sp) {
            if (row[sp] == 0) continue;
            double p = static_cast<double>(row[sp]) / n;
            eu += p * v_up_[s_index(h + 1, sp)];
            el += p * v_lo_[s_index(h + 1, sp)];
          }
          up += eu;
          lo += el;
        }
        double b = bonus(n);
        q_up_[sa_index(h, s, a)] = std::min(up + b, static_cast<double>(horizon_));
        q_lo_[sa_index(h, s, a)] = std::max(lo - b, 0.0);
      }
      bool visited = false;
      for (int a = 0; a < A; ++a) visited |= n_sa_[sa_index(h, s, a)] > 0;
      if (!visited) continue;
      int best = 0;
      for (int a = 1; a < A; ++a) {
        if (q_up_[sa_index(h, s, a)] > q_up_[sa_index(h, s, best)]) best = a;
      }
      greedy_.at(h, s) = best;
      v_up_[s_index(h, s)] = q_up_[sa_index(h, s, best)];
      v_lo_[s_index(h, s)] = q_lo_[sa_index(h, s, best)];
    }
  }
}

void ExplorationAttack::maybe_adopt_incumbent(std::int64_t episode) {
  double expected_gap = 0.0;
  for (int s = 0; s < num_states_; ++s) {
    expected_gap += p0_hat_[s] * (v_up_[s_index(0, s)] - v_lo_[s_index(0, s)]);
  }
  double stat = expected_gap +
                horizon_ * std::sqrt(num_states_ *
                                     std::log(2.0 * tau_ / delta_) /
                                     (2.0 * episode));
  if (stat <= best_stat_) {  // later ties replace the incumbent
    best_stat_ = stat;
    incumbent_ = greedy_;
  }
}

void ExplorationAttack::episode_begin(std::int64_t episode) {
  refresh_bounds();
  maybe_adopt_incumbent(episode);
}

void ExplorationAttack::on_step(int h, const StepRecord& record) {
  if (!record.has_attacker_reward) {
    throw ConfigError("exploration attack needs the attacker reward feed");
  }
  std::size_t idx = sa_index(h, record.state, record.post_action);
  std::int64_t n = ++n_sa_[idx];
  r_hat_[idx] += (record.attacker_reward - r_hat_[idx]) / n;
  if (record.next_state >= 0 && h + 1 < horizon_) {
    ++n_next_[idx * num_states_ + record.next_state];
  }
}

void ExplorationAttack::episode_end(const Trajectory& trajectory) {
  ++episodes_done_;
  ++n0_[trajectory.initial_state()];
  for (int s = 0; s < num_states_; ++s) {
    p0_hat_[s] = static_cast<double>(n0_[s]) / episodes_done_;
  }
}

DeterministicJointPolicy exploration_phase(
    const MarkovGameSpec& spec, std::span<const double> attacker_reward,
    std::int64_t tau, double delta, Rng& rng, ExplorationAttack* state_out) {
  require_valid(spec);
  ExplorationAttack attack(spec.num_states, spec.num_joint_actions(),
                           spec.horizon, tau, delta);
  // Actions are overridden anyway; a fixed uniform source stands in for the
  // agents.
  FixedPolicySource source(spec, ProductPolicy::uniform(spec));
  for (std::int64_t k = 1; k <= tau; ++k) {
    attack.episode_begin(k);
    Trajectory traj =
        sample_episode(spec, source, &attack, rng, attacker_reward);
    attack.episode_end(traj);
  }
  DeterministicJointPolicy out = attack.incumbent();
  if (state_out) *state_out = std::move(attack);
  return out;
}

ApproximateMixedAttack::ApproximateMixedAttack(
    const MarkovGameSpec& spec_shape, std::int64_t tau, double delta)
    : spec_(&spec_shape),
      exploration_(spec_shape.num_states, spec_shape.num_joint_actions(),
                   spec_shape.horizon, tau, delta) {}

void ApproximateMixedAttack::episode_begin(std::int64_t episode) {
  episode_ = episode;
  if (exploring()) {
    exploration_.episode_begin(episode);
  } else if (!mixed_.has_value()) {
    learned_ = exploration_.incumbent();
    mixed_.emplace(*spec_, learned_);
  }
}

int ApproximateMixedAttack::on_actions(int h, int s, int joint_action,
                                       Rng& rng) {
  return exploring() ? exploration_.on_actions(h, s, joint_action, rng)
                     : mixed_->on_actions(h, s, joint_action, rng);
}

void ApproximateMixedAttack::on_rewards(int h, int s, int pre_action,
                                        int post_action,
                                        std::span<const double> env_rewards,
                                        std::span<double> observed) {
  if (exploring()) {
    exploration_.on_rewards(h, s, pre_action, post_action, env_rewards,
                            observed);
  } else {
    mixed_->on_rewards(h, s, pre_action, post_action, env_rewards, observed);
  }
}

void ApproximateMixedAttack::on_step(int h, const StepRecord& record) {
  if (exploring()) exploration_.on_step(h, record);
}

void ApproximateMixedAttack::episode_end(const Trajectory& trajectory) {
  if (exploring()) exploration_.episode_end(trajectory);
}

const DeterministicJointPolicy* ApproximateMixedAttack::current_target()
    const {
  return exploring() ? &exploration_.incumbent() : &learned_;
}

const DeterministicJointPolicy& ApproximateMixedAttack::learned_target()
    const {
  if (!mixed_.has_value()) {
    throw ConfigError("exploration phase has not finished");
  }
  return learned_;
}

}  // namespace mga
