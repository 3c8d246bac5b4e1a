#include "mga/post_attack.hpp"

#include <cmath>
#include <limits>

namespace mga {

MarkovAttackModel MarkovAttackModel::identity(const MarkovGameSpec& spec) {
  MarkovAttackModel m;
  m.horizon = spec.horizon;
  m.num_states = spec.num_states;
  m.num_joint_actions = spec.num_joint_actions();
  m.num_agents = spec.num_agents;
  m.action_mix.assign(static_cast<std::size_t>(m.horizon) * m.num_states *
                          m.num_joint_actions * m.num_joint_actions,
                      0.0);
  for (int h = 0; h < m.horizon; ++h) {
    for (int s = 0; s < m.num_states; ++s) {
      for (int a = 0; a < m.num_joint_actions; ++a) m.mix(h, s, a, a) = 1.0;
    }
  }
  m.reward_override.assign(static_cast<std::size_t>(m.num_agents) *
                               m.horizon * m.num_states * m.num_joint_actions,
                           std::numeric_limits<double>::quiet_NaN());
  return m;
}

MarkovGameSpec post_attack_env(const MarkovGameSpec& spec,
                               const MarkovAttackModel& attack) {
  require_valid(spec);
  const int S = spec.num_states;
  const int A = spec.num_joint_actions();
  const int H = spec.horizon;
  const int m = spec.num_agents;
  if (attack.horizon != H || attack.num_states != S ||
      attack.num_joint_actions != A || attack.num_agents != m) {
    throw SpecError("attack model shape mismatch");
  }

  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        double sum = 0.0;
        for (int ap = 0; ap < A; ++ap) {
          double w = attack.mix(h, s, a, ap);
          if (w < 0.0) throw SpecError("attack mix has a negative weight");
          sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-12) {
          throw SpecError("attack mix row does not sum to 1");
        }
      }
    }
  }

  MarkovGameSpec out = spec;

  for (int h = 0; h + 1 < H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        double* row =
            out.transitions.data() +
            ((static_cast<std::size_t>(h) * S + s) * A + a) * S;
        std::fill(row, row + S, 0.0);
        for (int ap = 0; ap < A; ++ap) {
          double w = attack.mix(h, s, a, ap);
          if (w == 0.0) continue;
          auto src = spec.transition_row(h, s, ap);
          if (w == 1.0) {
            for (int sp = 0; sp < S; ++sp) row[sp] = src[sp];
          } else {
            for (int sp = 0; sp < S; ++sp) row[sp] += w * src[sp];
          }
        }
      }
    }
  }

  for (int i = 0; i < m; ++i) {
    for (int h = 0; h < H; ++h) {
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
          double& dst =
              out.mean_rewards[((static_cast<std::size_t>(i) * H + h) * S +
                                s) *
                                   A +
                               a];
          double ov = attack.override_at(i, h, s, a);
          if (!std::isnan(ov)) {
            dst = ov;
            continue;
          }
          double r = 0.0;
          for (int ap = 0; ap < A; ++ap) {
            double w = attack.mix(h, s, a, ap);
            if (w == 0.0) continue;
            if (w == 1.0) {
              r = spec.reward(i, h, s, ap);
              break;
            }
            r += w * spec.reward(i, h, s, ap);
          }
          dst = r;
        }
      }
    }
  }

  ValidationReport rep = validate_spec(out);
  if (!rep.ok) {
    throw SpecError("post-attack environment invalid: " + rep.message);
  }
  return out;
}

}  // namespace mga
