#include <doctest.h>

#include <cmath>

#include "mga/attacks.hpp"
#include "mga/dp.hpp"
#include "mga/exploration.hpp"
#include "mga/fixtures.hpp"
#include "mga/metrics.hpp"
#include "mga/post_attack.hpp"
#include "mga/simulate.hpp"
#include "mga/testing/brute_force.hpp"

using namespace mga;

namespace {

// Three-agent, one-state, one-step game with per-agent rewards increasing in
// the own action index.
MarkovGameSpec tiny_three_agent() {
  MarkovGameSpec spec;
  spec.num_agents = 3;
  spec.num_states = 1;
  spec.horizon = 1;
  spec.actions_per_agent = {2, 2, 2};
  spec.initial_dist = {1.0};
  spec.mean_rewards.assign(3 * 8, 0.0);
  for (int i = 0; i < 3; ++i) {
    for (int a = 0; a < 8; ++a) {
      int own = (a >> (2 - i)) & 1;
      spec.mean_rewards[static_cast<std::size_t>(i) * 8 + a] =
          0.3 + 0.4 * own;
    }
  }
  return spec;
}

ProductPolicy biased_policy(const MarkovGameSpec& spec, double p_first) {
  ProductPolicy pi = ProductPolicy::uniform(spec);
  for (int h = 0; h < spec.horizon; ++h) {
    for (int s = 0; s < spec.num_states; ++s) {
      for (int i = 0; i < spec.num_agents; ++i) {
        pi.set(i, h, s, 0, p_first);
        pi.set(i, h, s, 1, 1.0 - p_first);
      }
    }
  }
  return pi;
}

// Mean per-agent observed return from the initial distribution under an
// attacked run, with standard errors.
struct McEstimate {
  std::vector<double> mean, se;
};
McEstimate attacked_return(const MarkovGameSpec& spec, const ProductPolicy& pi,
                           AttackHooks& hooks, int episodes, unsigned seed) {
  Rng rng(seed);
  FixedPolicySource source(spec, pi);
  std::vector<double> sum(spec.num_agents, 0.0), sumsq(spec.num_agents, 0.0);
  for (int k = 1; k <= episodes; ++k) {
    hooks.episode_begin(k);
    Trajectory traj = sample_episode(spec, source, &hooks, rng);
    hooks.episode_end(traj);
    for (int i = 0; i < spec.num_agents; ++i) {
      double ret = 0.0;
      for (const auto& rec : traj.steps) ret += rec.observed_rewards[i];
      sum[i] += ret;
      sumsq[i] += ret * ret;
    }
  }
  McEstimate est;
  est.mean.resize(spec.num_agents);
  est.se.resize(spec.num_agents);
  for (int i = 0; i < spec.num_agents; ++i) {
    est.mean[i] = sum[i] / episodes;
    double var = sumsq[i] / episodes - est.mean[i] * est.mean[i];
    est.se[i] = std::sqrt(std::max(var, 1e-12) / episodes);
  }
  return est;
}

double expected_initial_value(const MarkovGameSpec& spec,
                              const ValueTables& vt, int agent) {
  double v = 0.0;
  for (int s = 0; s < spec.num_states; ++s) {
    v += spec.initial_dist[s] * vt.value(agent, 0, s);
  }
  return v;
}

}  // namespace

TEST_SUITE_BEGIN("attacks");

TEST_CASE("d-portion rewrite probabilities match d/m") {
  MarkovGameSpec game = case_mg();
  DeterministicJointPolicy target = case2_target();
  DPortionAttack attack(game, target);
  Rng rng(11);

  // On-target joint actions pass through untouched.
  for (int k = 0; k < 100; ++k) {
    CHECK(attack.on_actions(0, 0, target.at(0, 0), rng) == target.at(0, 0));
  }

  const int n = 100000;
  struct Case {
    int joint;
    double p_target;  // d/m with d = m/2 + (#on target)/2
  };
  for (const Case& c : {Case{3, 0.5}, Case{1, 0.75}, Case{2, 0.75}}) {
    int to_target = 0, to_worse = 0;
    for (int k = 0; k < n; ++k) {
      int out = attack.on_actions(0, 0, c.joint, rng);
      to_target += out == target.at(0, 0);
      to_worse += out == attack.fallback().at(0, 0);
    }
    CHECK(to_target + to_worse == n);
    double freq = static_cast<double>(to_target) / n;
    double sigma = std::sqrt(c.p_target * (1 - c.p_target) / n);
    CHECK(std::abs(freq - c.p_target) <= 3 * sigma);
  }
}

TEST_CASE("d-portion setup fails when no worse action exists") {
  MarkovGameSpec game = case_mg();
  CHECK_THROWS_AS(DPortionAttack(game, case1_target()), ConditionViolated);
}

TEST_CASE("eta-gap rewrites rewards to the dominated margin") {
  MarkovGameSpec game = case_mg();
  DeterministicJointPolicy target = case2_target();
  EtaGapAttack attack(game, target, 0.1);

  std::vector<double> env = {0.37, 0.62}, seen(2);

  // All agents on target: untouched.
  attack.on_rewards(0, 0, target.at(0, 0), target.at(0, 0), env, seen);
  CHECK(seen[0] == 0.37);
  CHECK(seen[1] == 0.62);

  // Final step at the third state (target DD): agent 0 plays C.
  attack.on_rewards(1, 2, /*pre=*/1, /*post=*/1, env, seen);
  CHECK(seen[0] == doctest::Approx(0.8).epsilon(1e-12));   // 0.9 - 0.1
  CHECK(seen[1] == doctest::Approx(0.9).epsilon(1e-12));   // mean, no margin

  // Earlier step: the margin grows by (H-h) * reward range = 0.9.
  attack.on_rewards(0, 0, /*pre=*/2, /*post=*/2, env, seen);
  CHECK(seen[0] == doctest::Approx(1.0 - 0.1 - 0.9).epsilon(1e-12));
  CHECK(seen[1] == doctest::Approx(1.0).epsilon(1e-12));

  // An eta above the admissible cap is rejected at setup.
  CHECK_THROWS_AS(EtaGapAttack(game, target, 0.11), ConditionViolated);
  CHECK_THROWS_AS(EtaGapAttack(game, case1_target(), 0.05),
                  ConditionViolated);
}

TEST_CASE("mixed attack forces the target and zeroes deviators") {
  MarkovGameSpec game = case_mg();
  DeterministicJointPolicy target = case2_target();
  MixedAttack attack(game, target);
  Rng rng(3);

  CHECK(attack.on_actions(0, 0, 3, rng) == target.at(0, 0));
  CHECK(attack.on_actions(1, 2, 0, rng) == target.at(1, 2));

  std::vector<double> env = {0.7, 0.4}, seen(2);
  attack.on_rewards(0, 0, /*pre=*/2, target.at(0, 0), env, seen);
  CHECK(seen[0] == 0.0);   // agent 0 played D against target C
  CHECK(seen[1] == 0.4);   // agent 1 was on target

  StepRecord rec;
  rec.state = 0;
  rec.pre_action = 2;
  rec.post_action = target.at(0, 0);
  rec.env_rewards = env;
  rec.observed_rewards = seen;
  Trajectory traj;
  traj.steps = {rec, rec};
  EpisodeIncrements inc = accumulate(game, traj, &target);
  CHECK(inc.cost == doctest::Approx(2 * 1.7).epsilon(1e-12));
  CHECK(inc.loss1 == 2);

  // Every agent deviating: all actions rewritten, all rewards zeroed.
  MarkovGameSpec tiny = tiny_three_agent();
  DeterministicJointPolicy up{1, 1, {7}};  // everyone plays action 1
  MixedAttack grab(tiny, up);
  std::vector<double> env3 = {0.5, 0.6, 0.7}, seen3(3);
  CHECK(grab.on_actions(0, 0, 0, rng) == 7);
  grab.on_rewards(0, 0, 0, 7, env3, seen3);
  for (double r : seen3) CHECK(r == 0.0);
}

TEST_CASE("no strategy touches a fully on-target step") {
  MarkovGameSpec game = case_mg();
  DeterministicJointPolicy target = case2_target();
  DPortionAttack dp(game, target);
  EtaGapAttack eg(game, target, 0.05);
  MixedAttack mx(game, target);
  TargetMeanRewardAttack nv(game, target);
  Rng rng(8);

  FixedPolicySource source(game, to_product(game, target));
  for (AttackHooks* hooks :
       {static_cast<AttackHooks*>(&dp), static_cast<AttackHooks*>(&eg),
        static_cast<AttackHooks*>(&mx), static_cast<AttackHooks*>(&nv)}) {
    for (int k = 1; k <= 50; ++k) {
      hooks->episode_begin(k);
      Trajectory traj = sample_episode(game, source, hooks, rng);
      hooks->episode_end(traj);
      EpisodeIncrements inc = accumulate(game, traj, &target);
      CHECK(inc.cost == 0.0);
      CHECK(inc.loss1 == 0.0);
    }
  }
}

TEST_CASE("markov models reproduce simulated attacked returns") {
  MarkovGameSpec game = case_mg();
  DeterministicJointPolicy target = case2_target();
  ProductPolicy pi = biased_policy(game, 0.7);
  const int episodes = 10000;

  DPortionAttack dp(game, target);
  EtaGapAttack eg(game, target, 0.05);
  MixedAttack mx(game, target);
  TargetMeanRewardAttack nv(game, target);
  struct Named {
    AttackHooks* hooks;
    MarkovAttackModel model;
    unsigned seed;
  };
  std::vector<Named> cases = {{&dp, dp.markov_model(), 101},
                              {&eg, eg.markov_model(), 102},
                              {&mx, mx.markov_model(), 103},
                              {&nv, nv.markov_model(), 104}};
  for (auto& c : cases) {
    MarkovGameSpec attacked = post_attack_env(game, c.model);
    ValueTables vt = evaluate_policy(attacked, pi);
    McEstimate mc = attacked_return(game, pi, *c.hooks, episodes, c.seed);
    for (int i = 0; i < game.num_agents; ++i) {
      double dpval = expected_initial_value(game, vt, i);
      CHECK(std::abs(mc.mean[i] - dpval) <= 3.0 * mc.se[i] + 1e-9);
    }
  }
}

TEST_CASE("the target is an exact equilibrium of each post-attack game") {
  MarkovGameSpec game = case_mg();
  DeterministicJointPolicy target = case2_target();
  ProductPolicy as_product = to_product(game, target);

  DPortionAttack dp(game, target);
  EtaGapAttack eg(game, target, 0.05);
  MixedAttack mx(game, target);
  for (const MarkovAttackModel& model :
       {dp.markov_model(), eg.markov_model(), mx.markov_model()}) {
    MarkovGameSpec attacked = post_attack_env(game, model);
    for (double g : ne_gap(attacked, as_product)) {
      CHECK(std::abs(g) <= 1e-9);
    }
  }
}

TEST_CASE("exploration bonus arithmetic") {
  ExplorationAttack attack(3, 4, 2, 1000, 0.05);
  // (H sqrt(S) + 1) sqrt(log(2*A*H*tau/delta)/2) at one visit.
  double want = (2.0 * std::sqrt(3.0) + 1.0) *
                std::sqrt(std::log(2.0 * 4 * 2 * 1000 / 0.05) / 2.0);
  CHECK(attack.bonus(1) == doctest::Approx(want).epsilon(1e-12));
  CHECK(attack.bonus(1) == doctest::Approx(11.2376).epsilon(1e-4));
  CHECK_THROWS_AS(ExplorationAttack(3, 4, 2, 0, 0.05), ConfigError);
}

TEST_CASE("unvisited entries keep their optimistic bounds") {
  MarkovGameSpec game = case_mg();
  std::vector<double> r_dagger = agent_reward_tensor(game, 0);
  Rng rng(21);
  ExplorationAttack state(3, 4, 2, 50, 0.05);
  exploration_phase(game, r_dagger, 50, 0.05, rng, &state);
  // s0 is never the second-step state for itself under these dynamics, so
  // (h=1, s=0) stays untouched.
  for (int a = 0; a < 4; ++a) {
    CHECK(state.count(1, 0, a) == 0);
    CHECK(state.q_upper(1, 0, a) == doctest::Approx(2.0));
    CHECK(state.q_lower(1, 0, a) == doctest::Approx(0.0));
  }
}

TEST_CASE("exploration identifies the better arm of a bandit-like game") {
  MarkovGameSpec spec;
  spec.num_agents = 1;
  spec.num_states = 1;
  spec.horizon = 1;
  spec.actions_per_agent = {2};
  spec.initial_dist = {1.0};
  spec.mean_rewards = {0.9, 0.1};
  std::vector<double> r_dagger = {0.9, 0.1};

  Rng rng(31);
  DeterministicJointPolicy learned =
      exploration_phase(spec, r_dagger, 2000, 0.05, rng);
  CHECK(learned.at(0, 0) == 0);

  // Same game with the arms swapped, so the answer is not the tie-break
  // default.
  spec.mean_rewards = {0.1, 0.9};
  r_dagger = {0.1, 0.9};
  Rng rng2(31);
  learned = exploration_phase(spec, r_dagger, 2000, 0.05, rng2);
  CHECK(learned.at(0, 0) == 1);
}

TEST_CASE("mixed markov model matches its closed form") {
  MarkovGameSpec game = case_mg();
  DeterministicJointPolicy target = case2_target();
  MarkovGameSpec attacked =
      post_attack_env(game, MixedAttack(game, target).markov_model());
  for (int h = 0; h < 2; ++h) {
    for (int s = 0; s < 3; ++s) {
      int tgt = target.at(h, s);
      for (int a = 0; a < 4; ++a) {
        for (int i = 0; i < 2; ++i) {
          bool on_target =
              game.agent_action(a, i) == game.agent_action(tgt, i);
          CHECK(attacked.reward(i, h, s, a) ==
                (on_target ? game.reward(i, h, s, tgt) : 0.0));
        }
        if (h + 1 < 2) {
          auto got = attacked.transition_row(h, s, a);
          auto want = game.transition_row(h, s, tgt);
          for (int sp = 0; sp < 3; ++sp) CHECK(got[sp] == want[sp]);
        }
      }
    }
  }
}

TEST_CASE("incumbent statistic is nonincreasing over episodes") {
  MarkovGameSpec game = case_mg();
  std::vector<double> r_dagger = agent_reward_tensor(game, 0);
  ExplorationAttack attack(3, 4, 2, 300, 0.05);
  FixedPolicySource source(game, ProductPolicy::uniform(game));
  Rng rng(5);
  double last = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 300; ++k) {
    attack.episode_begin(k);
    CHECK(attack.incumbent_stat() <= last + 1e-12);
    last = attack.incumbent_stat();
    Trajectory traj = sample_episode(game, source, &attack, rng, r_dagger);
    attack.episode_end(traj);
  }
}

TEST_CASE("optimistic and pessimistic bounds bracket the true values") {
  // Validity of the bound tables against exact DP, in at least 19/20 seeds.
  MarkovGameSpec game = case_mg();
  std::vector<double> r_dagger = agent_reward_tensor(game, 0);
  JointOptimum opt = joint_optimum(game, r_dagger);
  const int tau = 400;
  int good_seeds = 0;
  for (unsigned seed = 0; seed < 20; ++seed) {
    Rng rng(9000 + seed);
    ExplorationAttack attack(3, 4, 2, tau, 0.05);
    FixedPolicySource source(game, ProductPolicy::uniform(game));
    bool ok = true;
    for (int k = 1; k <= tau; ++k) {
      attack.episode_begin(k);
      if (k % 20 == 0) {
        std::vector<double> v_greedy =
            evaluate_under_reward(game, attack.greedy(), r_dagger);
        for (int h = 0; h < 2 && ok; ++h) {
          for (int s = 0; s < 3 && ok; ++s) {
            for (int a = 0; a < 4 && ok; ++a) {
              if (attack.count(h, s, a) == 0) continue;
              double q_star =
                  r_dagger[(h * 3 + s) * 4 + a] +
                  (h + 1 < 2 ? [&] {
                    auto row = game.transition_row(h, s, a);
                    double e = 0.0;
                    for (int sp = 0; sp < 3; ++sp) {
                      e += row[sp] * opt.value(h + 1, sp);
                    }
                    return e;
                  }() : 0.0);
              double q_greedy =
                  r_dagger[(h * 3 + s) * 4 + a] +
                  (h + 1 < 2 ? [&] {
                    auto row = game.transition_row(h, s, a);
                    double e = 0.0;
                    for (int sp = 0; sp < 3; ++sp) {
                      e += row[sp] * v_greedy[3 + sp];
                    }
                    return e;
                  }() : 0.0);
              ok = attack.q_upper(h, s, a) >= q_star - 1e-9 &&
                   attack.q_lower(h, s, a) <= q_greedy + 1e-9;
            }
          }
        }
      }
      Trajectory traj = sample_episode(game, source, &attack, rng, r_dagger);
      attack.episode_end(traj);
    }
    good_seeds += ok;
  }
  CHECK(good_seeds >= 19);
}

TEST_CASE("approximate mixed attack switches phases at tau") {
  MarkovGameSpec spec;
  spec.num_agents = 1;
  spec.num_states = 1;
  spec.horizon = 1;
  spec.actions_per_agent = {2};
  spec.initial_dist = {1.0};
  spec.mean_rewards = {0.9, 0.1};
  std::vector<double> r_dagger = {0.9, 0.1};

  const std::int64_t tau = 1500;
  ApproximateMixedAttack attack(spec, tau, 0.05);
  FixedPolicySource source(spec, biased_policy(spec, 0.5));
  Rng rng(13);
  MetricsLog log;
  for (std::int64_t k = 1; k <= tau + 200; ++k) {
    attack.episode_begin(k);
    Trajectory traj = sample_episode(spec, source, &attack, rng,
                                     attack.exploring()
                                         ? std::span<const double>(r_dagger)
                                         : std::span<const double>());
    attack.episode_end(traj);
    log.add_episode(accumulate(spec, traj, attack.current_target()));
  }

  // Exploration rewrites all rewards to 1 and forces actions, so it pays
  // |1 - r| plus mismatches every step; with Bernoulli rewards a lucky
  // episode can cost 0, but the running mean cannot.
  auto costs = log.cost_increments();
  double explore_cost = 0.0;
  for (std::int64_t k = 0; k < tau; ++k) explore_cost += costs[k];
  CHECK(explore_cost / tau > 0.3);

  // The learned target matches the true optimum, and the attack-phase hooks
  // agree with the gray-box mixed attack pointwise.
  CHECK(attack.learned_target().at(0, 0) == 0);
  MixedAttack reference(spec, attack.learned_target());
  std::vector<double> env = {0.42}, a_seen(1), b_seen(1);
  for (int pre = 0; pre < 2; ++pre) {
    CHECK(attack.on_actions(0, 0, pre, rng) ==
          reference.on_actions(0, 0, pre, rng));
    attack.on_rewards(0, 0, pre, 0, env, a_seen);
    reference.on_rewards(0, 0, pre, 0, env, b_seen);
    CHECK(a_seen[0] == b_seen[0]);
  }
}

TEST_SUITE_END();
