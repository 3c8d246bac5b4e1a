#include "mga/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace mga {

EpisodeIncrements accumulate(const MarkovGameSpec& spec,
                             const Trajectory& trajectory,
                             const DeterministicJointPolicy* target) {
  if (trajectory.steps.empty()) throw SpecError("empty trajectory");
  EpisodeIncrements inc;
  for (int h = 0; h < static_cast<int>(trajectory.steps.size()); ++h) {
    const StepRecord& rec = trajectory.steps[h];
    if (static_cast<int>(rec.env_rewards.size()) != spec.num_agents ||
        static_cast<int>(rec.observed_rewards.size()) != spec.num_agents) {
      throw SpecError("trajectory lacks pre/post reward records");
    }
    for (int i = 0; i < spec.num_agents; ++i) {
      inc.cost += (spec.agent_action(rec.pre_action, i) !=
                   spec.agent_action(rec.post_action, i)) +
                  std::abs(rec.observed_rewards[i] - rec.env_rewards[i]);
      if (target) {
        inc.loss1 += spec.agent_action(rec.pre_action, i) !=
                     spec.agent_action(target->at(h, rec.state), i);
      }
    }
  }
  return inc;
}

void MetricsLog::add_episode(const EpisodeIncrements& inc) {
  ++episodes_;
  cost_cum_ += inc.cost;
  loss1_cum_ += inc.loss1;
  if (!std::isnan(loss2_current_)) loss2_cum_ += loss2_current_;
  cost_inc_.push_back(inc.cost);
  loss1_inc_.push_back(inc.loss1);
  loss2_val_.push_back(loss2_current_);
  regret_val_.push_back(regret_current_);
}

void MetricsLog::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "episode,cost_inc,cost_cum,loss1_inc,loss1_cum,loss2_ckpt,regret_ckpt\n";
  double cost = 0.0, loss1 = 0.0;
  char buf[192];
  for (std::int64_t k = 0; k < episodes_; ++k) {
    cost += cost_inc_[k];
    loss1 += loss1_inc_[k];
    std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<long long>(k + 1), cost_inc_[k], cost,
                  loss1_inc_[k], loss1, loss2_val_[k], regret_val_[k]);
    out << buf;
  }
}

double loss2_gap(const MarkovGameSpec& spec, std::span<const double> reward,
                 const JointOptimum& optimum, const ProductPolicy& pi,
                 int initial_state) {
  std::vector<double> v = evaluate_under_reward(spec, pi, reward);
  return optimum.value(0, initial_state) - v[initial_state];
}

double expected_loss1(const MarkovGameSpec& spec, const ProductPolicy& pi,
                      const DeterministicJointPolicy& target,
                      int initial_state) {
  const int S = spec.num_states;
  const int A = spec.num_joint_actions();
  std::vector<double> occupancy(S, 0.0);
  occupancy[initial_state] = 1.0;
  double expected = 0.0;
  std::vector<double> next(S);
  for (int h = 0; h < spec.horizon; ++h) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < S; ++s) {
      if (occupancy[s] == 0.0) continue;
      int tgt = target.at(h, s);
      for (int i = 0; i < spec.num_agents; ++i) {
        expected += occupancy[s] *
                    (1.0 - pi.get(i, h, s, spec.agent_action(tgt, i)));
      }
      if (h + 1 < spec.horizon) {
        for (int a = 0; a < A; ++a) {
          double pa = pi.joint_prob(spec, h, s, a);
          if (pa == 0.0) continue;
          auto row = spec.transition_row(h, s, a);
          for (int sp = 0; sp < S; ++sp) {
            next[sp] += occupancy[s] * pa * row[sp];
          }
        }
      }
    }
    occupancy.swap(next);
  }
  return expected;
}

namespace {

// Expected initial value for one agent when it plays the deterministic
// `own` table (or its snapshot component when own == nullptr) against the
// snapshot's other agents.
double agent_value(const MarkovGameSpec& spec, const ProductPolicy& pi,
                   int agent, const std::vector<int>* own) {
  const int S = spec.num_states;
  const int A = spec.num_joint_actions();
  std::vector<double> v(S, 0.0), v_next(S, 0.0);
  for (int h = spec.horizon - 1; h >= 0; --h) {
    v.swap(v_next);
    for (int s = 0; s < S; ++s) {
      double val = 0.0;
      for (int a = 0; a < A; ++a) {
        double p = 1.0;
        for (int i = 0; i < spec.num_agents && p > 0.0; ++i) {
          int ai = spec.agent_action(a, i);
          if (own && i == agent) {
            p *= ai == (*own)[h * S + s] ? 1.0 : 0.0;
          } else {
            p *= pi.get(i, h, s, ai);
          }
        }
        if (p == 0.0) continue;
        double q = spec.reward(agent, h, s, a);
        if (h + 1 < spec.horizon) {
          auto row = spec.transition_row(h, s, a);
          for (int sp = 0; sp < S; ++sp) q += row[sp] * v_next[sp];
        }
        val += p * q;
      }
      v[s] = val;
    }
  }
  double out = 0.0;
  for (int s = 0; s < S; ++s) out += spec.initial_dist[s] * v[s];
  return out;
}

}  // namespace

HindsightRegretTracker::HindsightRegretTracker(const MarkovGameSpec& spec)
    : spec_(&spec) {
  const int cells = spec.horizon * spec.num_states;
  candidates_.resize(spec.num_agents);
  candidate_sums_.resize(spec.num_agents);
  base_.assign(spec.num_agents, 0.0);
  for (int i = 0; i < spec.num_agents; ++i) {
    const int Ai = spec.actions_per_agent[i];
    if (std::pow(static_cast<double>(Ai), cells) > 2e5) {
      throw SpecError("hindsight regret enumeration too large for this game");
    }
    std::vector<int> own(cells, 0);
    while (true) {
      candidates_[i].push_back(own);
      int c = 0;
      while (c < cells) {
        if (++own[c] < Ai) break;
        own[c] = 0;
        ++c;
      }
      if (c == cells) break;
    }
    candidate_sums_[i].assign(candidates_[i].size(), 0.0);
  }
}

void HindsightRegretTracker::add_snapshot(const ProductPolicy& pi,
                                          double weight) {
  for (int i = 0; i < spec_->num_agents; ++i) {
    base_[i] += weight * agent_value(*spec_, pi, i, nullptr);
    for (std::size_t c = 0; c < candidates_[i].size(); ++c) {
      candidate_sums_[i][c] +=
          weight * agent_value(*spec_, pi, i, &candidates_[i][c]);
    }
  }
}

double HindsightRegretTracker::current(int agent) const {
  double best = -std::numeric_limits<double>::infinity();
  for (double v : candidate_sums_[agent]) best = std::max(best, v);
  return best - base_[agent];
}

double hindsight_regret(const MarkovGameSpec& spec,
                        std::span<const ProductPolicy> snapshots,
                        std::span<const double> weights, int agent) {
  if (snapshots.empty()) throw SpecError("empty policy archive");
  if (snapshots.size() != weights.size()) {
    throw SpecError("snapshot/weight size mismatch");
  }
  HindsightRegretTracker tracker(spec);
  for (std::size_t j = 0; j < snapshots.size(); ++j) {
    tracker.add_snapshot(snapshots[j], weights[j]);
  }
  return tracker.current(agent);
}

}  // namespace mga
