#include "mga/vlearning.hpp"

#include <algorithm>
#include <cmath>

namespace mga {

VLearner::VLearner(const VLearningConfig& config) : config_(config) {
  const std::size_t cells =
      static_cast<std::size_t>(config.horizon) * config.num_states;
  v_.resize(cells);
  v_accum_.resize(cells);
  for (int h = 0; h < config.horizon; ++h) {
    for (int s = 0; s < config.num_states; ++s) {
      v_[index(h, s)] = config.horizon - h;  // optimistic H+1-h (1-based)
      v_accum_[index(h, s)] = config.horizon - h;
    }
  }
  visits_.assign(cells, 0);
  bandits_.assign(cells, ExpWeightsBandit(config.num_actions, config.horizon));
  archive_.resize(cells);
}

double VLearner::beta(std::int64_t t) const {
  double h3 = std::pow(static_cast<double>(config_.horizon), 3);
  return config_.beta_c *
         std::sqrt(h3 * config_.num_actions * config_.iota / t);
}

void VLearner::step_update(std::int64_t episode, int h, int s, int own_action,
                           double reward, int next_state) {
  const std::size_t cell = index(h, s);
  std::int64_t t = ++visits_[cell];
  double v_next =
      (h + 1 < config_.horizon && next_state >= 0) ? value(h + 1, next_state)
                                                   : 0.0;
  double a = alpha_t(config_.horizon, t);
  v_accum_[cell] = (1.0 - a) * v_accum_[cell] + a * (reward + v_next + beta(t));
  v_[cell] = std::min(static_cast<double>(config_.horizon - h), v_accum_[cell]);

  Archive& arc = archive_[cell];
  arc.episodes.push_back(episode);
  auto theta = bandits_[cell].distribution();
  arc.thetas.insert(arc.thetas.end(), theta.begin(), theta.end());

  double loss = (config_.horizon - reward - v_next) / config_.horizon;
  bandits_[cell].update(own_action, loss);
}

VLearningTeam::VLearningTeam(const MarkovGameSpec& spec, double beta_c,
                             double iota)
    : spec_(&spec) {
  for (int i = 0; i < spec.num_agents; ++i) {
    VLearningConfig cfg;
    cfg.horizon = spec.horizon;
    cfg.num_states = spec.num_states;
    cfg.num_actions = spec.actions_per_agent[i];
    cfg.beta_c = beta_c;
    cfg.iota = iota;
    learners_.emplace_back(cfg);
  }
  own_.resize(spec.num_agents);
}

int VLearningTeam::act(int h, int s, Rng& rng) {
  for (int i = 0; i < size(); ++i) {
    own_[i] = learners_[i].select_action(h, s, rng);
  }
  return spec_->encode_joint(own_);
}

void VLearningTeam::observe(int h, int s, int joint_pre_action,
                            std::span<const double> observed_rewards,
                            int next_state) {
  for (int i = 0; i < size(); ++i) {
    learners_[i].step_update(episode_, h, s,
                             spec_->agent_action(joint_pre_action, i),
                             observed_rewards[i], next_state);
  }
}

ProductPolicy VLearningTeam::current_policy() const {
  ProductPolicy pi = ProductPolicy::uniform(*spec_);
  for (int i = 0; i < size(); ++i) {
    for (int h = 0; h < spec_->horizon; ++h) {
      for (int s = 0; s < spec_->num_states; ++s) {
        auto theta = learners_[i].bandit(h, s).distribution();
        auto dst = pi.dist(i, h, s);
        std::copy(theta.begin(), theta.end(), dst.begin());
      }
    }
  }
  return pi;
}

ProductPolicy VLearningTeam::output_policy(std::int64_t episodes) const {
  if (episodes < 1) throw SpecError("output policy needs completed episodes");
  const int H = spec_->horizon;
  ProductPolicy out = ProductPolicy::uniform(*spec_);

  std::vector<double> g, suffix, mixed;
  for (int i = 0; i < size(); ++i) {
    const VLearner& agent = learners_[i];
    const int Ai = spec_->actions_per_agent[i];
    for (int h = 0; h < H; ++h) {
      for (int s = 0; s < spec_->num_states; ++s) {
        const VLearner::Archive& arc = agent.archive(h, s);
        const std::int64_t n = static_cast<std::int64_t>(arc.episodes.size());

        // Episodes before the first visit still ran the initial uniform
        // policy; an episode k whose visit count here is t mixes snapshots
        // 1..t with alpha_t^j weights. Over all K episodes, snapshot j
        // collects
        //   sum_{t>=j} c_t alpha_t^j = (alpha_j/G_j) sum_{t>=j} c_t G_t,
        // where c_t counts episodes with visit count exactly t.
        if (n > 0 && arc.episodes.back() > episodes) {
          throw SpecError("policy archive extends past the episode window");
        }
        double uniform_weight = static_cast<double>(
            n > 0 ? arc.episodes[0] - 1 : episodes);

        mixed.assign(Ai, 0.0);
        if (n > 0) {
          g.resize(n + 1);
          g[0] = 1.0;  // unused slot to keep 1-based t
          for (std::int64_t t = 1; t <= n; ++t) {
            g[t] = g_step(H, t, g[t - 1]);
          }
          suffix.assign(n + 2, 0.0);
          for (std::int64_t t = n; t >= 1; --t) {
            std::int64_t next_visit =
                t < n ? arc.episodes[t] : episodes + 1;
            double c_t = static_cast<double>(next_visit - arc.episodes[t - 1]);
            suffix[t] = suffix[t + 1] + c_t * g[t];
          }
          for (std::int64_t j = 1; j <= n; ++j) {
            double w = alpha_t(H, j) / g[j] * suffix[j];
            const double* theta = arc.thetas.data() + (j - 1) * Ai;
            for (int ai = 0; ai < Ai; ++ai) mixed[ai] += w * theta[ai];
          }
        }
        double norm = 0.0;
        for (int ai = 0; ai < Ai; ++ai) {
          mixed[ai] += uniform_weight / Ai;
          norm += mixed[ai];
        }
        for (int ai = 0; ai < Ai; ++ai) {
          out.set(i, h, s, ai, mixed[ai] / norm);
        }
      }
    }
  }
  return out;
}

}  // namespace mga
