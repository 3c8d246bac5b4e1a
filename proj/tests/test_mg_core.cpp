#include <doctest.h>

#include <cmath>
#include <set>

#include "mga/conditions.hpp"
#include "mga/dp.hpp"
#include "mga/fixtures.hpp"
#include "mga/post_attack.hpp"
#include "mga/simulate.hpp"
#include "mga/types.hpp"
#include "mga/testing/brute_force.hpp"

using namespace mga;

namespace {

ProductPolicy both_play(const MarkovGameSpec& spec, int own_action) {
  DeterministicJointPolicy pi;
  pi.horizon = spec.horizon;
  pi.num_states = spec.num_states;
  std::vector<int> own(spec.num_agents, own_action);
  pi.joint.assign(static_cast<std::size_t>(spec.horizon) * spec.num_states,
                  spec.encode_joint(own));
  return to_product(spec, pi);
}

}  // namespace

TEST_SUITE_BEGIN("mg_core");

TEST_CASE("validate_spec accepts the matrix game and catches bad tensors") {
  MarkovGameSpec spec = table1_matrix_game();
  CHECK(validate_spec(spec).ok);

  MarkovGameSpec broken = case_mg();
  broken.transitions[1] -= 0.1;  // row now sums to 0.9
  auto rep = validate_spec(broken);
  CHECK_FALSE(rep.ok);
  CHECK(rep.message.find("non-stochastic row") != std::string::npos);

  MarkovGameSpec hot = table1_matrix_game();
  hot.mean_rewards[0] = 1.3;
  rep = validate_spec(hot);
  CHECK_FALSE(rep.ok);
  CHECK(rep.message.find("reward out of range") != std::string::npos);
}

TEST_CASE("evaluate_policy on the bundled fixtures") {
  MarkovGameSpec table = table1_matrix_game();
  CHECK(evaluate_policy(table, both_play(table, 0)).value(0, 0, 0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(evaluate_policy(table, both_play(table, 1)).value(0, 0, 0) ==
        doctest::Approx(0.1).epsilon(1e-12));

  MarkovGameSpec game = case_mg();
  ValueTables vt = evaluate_policy(game, case2_target());
  // 1 + 0.1*1 + 0.9*0.9, checked against the trajectory-enumeration oracle.
  double expect =
      oracle::value_from(game, to_product(game, case2_target()), 0, 0, 0);
  CHECK(expect == doctest::Approx(1.91).epsilon(1e-12));
  for (int i = 0; i < 2; ++i) {
    CHECK(vt.value(i, 0, 0) == doctest::Approx(1.91).epsilon(1e-12));
  }
}

TEST_CASE("evaluate_policy rejects shape mismatches") {
  MarkovGameSpec game = case_mg();
  ProductPolicy pi = ProductPolicy::uniform(table1_matrix_game());
  CHECK_THROWS_AS(evaluate_policy(game, pi), SpecError);
}

TEST_CASE("best_response against fixed opponents") {
  MarkovGameSpec game = case_mg();
  ProductPolicy defect = both_play(game, 1);
  BestResponseResult br = best_response(game, 0, defect);
  // {s0: C, s1: C, s2: D} at both steps, value 0.5 + 0.1*0.5 + 0.9*0.9.
  CHECK(br.values.value(0, 0, 0) == doctest::Approx(1.36).epsilon(1e-12));
  CHECK(br.action_at(0, 0) == 0);
  CHECK(br.action_at(1, 0) == 0);
  CHECK(br.action_at(1, 1) == 0);
  CHECK(br.action_at(1, 2) == 1);

  MarkovGameSpec table = table1_matrix_game();
  BestResponseResult brt = best_response(table, 0, both_play(table, 0));
  CHECK(brt.action_at(0, 0) == 0);
  CHECK(brt.values.value(0, 0, 0) == doctest::Approx(1.0));
}

TEST_CASE("best_response ties break to the lowest action index") {
  MarkovGameSpec spec = table1_matrix_game();
  std::fill(spec.mean_rewards.begin(), spec.mean_rewards.end(), 0.25);
  BestResponseResult br =
      best_response(spec, 0, ProductPolicy::uniform(spec));
  CHECK(br.action_at(0, 0) == 0);
}

TEST_CASE("ne_gap on the matrix game") {
  MarkovGameSpec table = table1_matrix_game();
  auto gap_cc = ne_gap(table, both_play(table, 0));
  CHECK(gap_cc[0] == doctest::Approx(0.0).epsilon(1e-12));
  auto gap_dd = ne_gap(table, both_play(table, 1));
  CHECK(gap_dd[0] == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("ne_gap of the single-agent optimum is zero") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    MarkovGameSpec spec = oracle::random_spec(rng, 3, 3, 1, 3);
    BestResponseResult br =
        best_response(spec, 0, ProductPolicy::uniform(spec));
    DeterministicJointPolicy pi{spec.horizon, spec.num_states, br.actions};
    auto gap = ne_gap(spec, to_product(spec, pi));
    for (double g : gap) CHECK(g == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("DP matches the brute-force oracles on random games") {
  Rng rng(123);
  for (int trial = 0; trial < 25; ++trial) {
    MarkovGameSpec spec = oracle::random_spec(rng);
    ProductPolicy pi = oracle::random_policy(spec, rng);
    ValueTables vt = evaluate_policy(spec, pi);
    for (int i = 0; i < spec.num_agents; ++i) {
      for (int s = 0; s < spec.num_states; ++s) {
        CHECK(vt.value(i, 0, s) ==
              doctest::Approx(oracle::value_from(spec, pi, i, 0, s))
                  .epsilon(1e-12));
      }
    }
    for (int i = 0; i < spec.num_agents; ++i) {
      BestResponseResult br = best_response(spec, i, pi);
      for (int s = 0; s < spec.num_states; ++s) {
        CHECK(br.values.value(0, 0, s) ==
              doctest::Approx(oracle::best_response_value(spec, i, pi, s))
                  .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("Bellman consistency and nonnegative gaps on random games") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    MarkovGameSpec spec = oracle::random_spec(rng, 3, 2, 2, 3);
    ProductPolicy pi = oracle::random_policy(spec, rng);
    ValueTables vt = evaluate_policy(spec, pi);
    for (int i = 0; i < spec.num_agents; ++i) {
      for (int h = 0; h < spec.horizon; ++h) {
        for (int s = 0; s < spec.num_states; ++s) {
          CHECK(vt.value(i, h, s) <= spec.horizon - h + 1e-10);
          double mix = 0.0;
          for (int a = 0; a < spec.num_joint_actions(); ++a) {
            mix += pi.joint_prob(spec, h, s, a) * vt.qvalue(i, h, s, a);
          }
          CHECK(std::abs(vt.value(i, h, s) - mix) <= 1e-10);
        }
      }
    }
    for (double g : ne_gap(spec, pi)) CHECK(g >= -1e-12);
  }
}

TEST_CASE("best-response profile is an equilibrium when agents are decoupled") {
  // Rewards depend only on the acting agent's own action and transitions are
  // action-independent, so the per-agent optima assemble into a joint one.
  Rng rng(42);
  MarkovGameSpec spec = oracle::random_spec(rng, 3, 2, 2, 2);
  const int S = spec.num_states;
  const int A = spec.num_joint_actions();
  for (int i = 0; i < spec.num_agents; ++i) {
    for (int h = 0; h < spec.horizon; ++h) {
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
          int own = spec.agent_action(a, i);
          spec.mean_rewards[((static_cast<std::size_t>(i) * spec.horizon +
                              h) *
                                 S +
                             s) *
                                A +
                            a] = 0.1 + 0.03 * i + 0.2 * own + 0.05 * s;
        }
      }
    }
  }
  for (int h = 0; h + 1 < spec.horizon; ++h) {
    for (int s = 0; s < S; ++s) {
      auto first = spec.transition_row(h, s, 0);
      std::vector<double> row(first.begin(), first.end());
      for (int a = 1; a < A; ++a) {
        for (int sp = 0; sp < S; ++sp) {
          spec.transitions[((static_cast<std::size_t>(h) * S + s) * A + a) *
                               S +
                           sp] = row[sp];
        }
      }
    }
  }
  require_valid(spec);

  ProductPolicy profile = ProductPolicy::uniform(spec);
  for (int i = 0; i < spec.num_agents; ++i) {
    BestResponseResult br = best_response(spec, i, profile);
    for (int h = 0; h < spec.horizon; ++h) {
      for (int s = 0; s < S; ++s) {
        for (int ai = 0; ai < spec.actions_per_agent[i]; ++ai) {
          profile.set(i, h, s, ai, ai == br.actions[h * S + s] ? 1.0 : 0.0);
        }
      }
    }
  }
  for (double g : ne_gap(spec, profile)) {
    CHECK(g == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("worse_policy picks the max-min-gap action") {
  MarkovGameSpec game = case_mg();
  DeterministicJointPolicy worse = worse_policy(game, case2_target());
  // At (h=1, s2) the target is (D,D) with value 0.9: (C,C) is better, (D,D)
  // has zero gap, (C,D)/(D,C) tie at 0.4 and the lower joint index wins.
  CHECK(worse.at(1, 2) == 1);
  CHECK(worse.at(0, 0) == 3);
  CHECK(worse.at(1, 0) == 3);
  CHECK(worse.at(1, 1) == 3);

  MarkovGameSpec table = table1_matrix_game();
  DeterministicJointPolicy dd{1, 1, {3}};
  CHECK_THROWS_AS(worse_policy(table, dd), ConditionViolated);
}

TEST_CASE("condition checks on the two fixture targets") {
  MarkovGameSpec game = case_mg();

  Condition1Report c1 = check_condition1(game, case1_target());
  CHECK_FALSE(c1.holds);
  Condition2Report c2 = check_condition2(game, case1_target(), 0.05);
  CHECK_FALSE(c2.holds);

  c1 = check_condition1(game, case2_target());
  CHECK(c1.holds);
  CHECK(c1.delta_min == doctest::Approx(0.4).epsilon(1e-12));
  c2 = check_condition2(game, case2_target(), 0.05);
  CHECK(c2.holds);
  CHECK(c2.delta_r == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(c2.eta_max == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_FALSE(check_condition2(game, case2_target(), 0.11).holds);
}

TEST_CASE("post_attack_env identity returns the spec unchanged") {
  MarkovGameSpec game = case_mg();
  MarkovGameSpec same = post_attack_env(game, MarkovAttackModel::identity(game));
  CHECK(same.transitions == game.transitions);
  CHECK(same.mean_rewards == game.mean_rewards);
  CHECK(same.initial_dist == game.initial_dist);
}

TEST_CASE("post_attack_env mixes rewards and transitions") {
  MarkovGameSpec game = case_mg();
  // One deviating agent under the action attack: the env sees the target
  // with probability 0.75 and the fallback with 0.25.
  DeterministicJointPolicy target = case2_target();
  DeterministicJointPolicy worse = worse_policy(game, target);
  MarkovAttackModel model = MarkovAttackModel::identity(game);
  int h = 0, s = 0, a = 1;  // (C,D) at s0: one agent off target
  model.mix(h, s, a, a) = 0.0;
  model.mix(h, s, a, target.at(h, s)) = 0.75;
  model.mix(h, s, a, worse.at(h, s)) += 0.25;
  MarkovGameSpec attacked = post_attack_env(game, model);
  for (int i = 0; i < 2; ++i) {
    double want = 0.75 * game.reward(i, h, s, target.at(h, s)) +
                  0.25 * game.reward(i, h, s, worse.at(h, s));
    CHECK(attacked.reward(i, h, s, a) == doctest::Approx(want).epsilon(1e-12));
  }
  auto row = attacked.transition_row(h, s, a);
  auto tgt = game.transition_row(h, s, target.at(h, s));
  auto wrs = game.transition_row(h, s, worse.at(h, s));
  for (int sp = 0; sp < 3; ++sp) {
    CHECK(row[sp] ==
          doctest::Approx(0.75 * tgt[sp] + 0.25 * wrs[sp]).epsilon(1e-12));
  }

  // Bad models are rejected.
  model.mix(h, s, a, target.at(h, s)) = 0.9;
  CHECK_THROWS_AS(post_attack_env(game, model), SpecError);
}

TEST_CASE("sample_episode is deterministic and respects the dynamics") {
  MarkovGameSpec game = case_mg();
  ProductPolicy defect = both_play(game, 1);

  SUBCASE("degenerate randomness pins the trajectory") {
    MarkovGameSpec det = case_mg();
    // All mass to s1 and Bernoulli(1) rewards.
    const int S = 3, A = 4;
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        for (int sp = 0; sp < S; ++sp) {
          det.transitions[((0 * S + s) * A + a) * S + sp] = sp == 1 ? 1.0 : 0.0;
        }
      }
    }
    std::fill(det.mean_rewards.begin(), det.mean_rewards.end(), 1.0);
    Rng rng(5);
    FixedPolicySource src(det, both_play(det, 0));
    Trajectory traj = sample_episode(det, src, nullptr, rng);
    CHECK(traj.steps[0].state == 0);
    CHECK(traj.steps[0].next_state == 1);
    CHECK(traj.steps[1].state == 1);
    for (const auto& rec : traj.steps) {
      for (double r : rec.env_rewards) CHECK(r == 1.0);
      CHECK(rec.pre_action == 0);
      CHECK(rec.post_action == 0);
    }
  }

  SUBCASE("same seed, same trajectory") {
    for (int seed : {1, 2, 3}) {
      Rng r1(seed), r2(seed);
      FixedPolicySource s1(game, defect), s2(game, defect);
      Trajectory t1 = sample_episode(game, s1, nullptr, r1);
      Trajectory t2 = sample_episode(game, s2, nullptr, r2);
      REQUIRE(t1.steps.size() == t2.steps.size());
      for (std::size_t h = 0; h < t1.steps.size(); ++h) {
        CHECK(t1.steps[h].state == t2.steps[h].state);
        CHECK(t1.steps[h].pre_action == t2.steps[h].pre_action);
        CHECK(t1.steps[h].env_rewards == t2.steps[h].env_rewards);
        CHECK(t1.steps[h].next_state == t2.steps[h].next_state);
      }
    }
  }

  SUBCASE("(D,D) at s0 reaches s1 with frequency 0.9") {
    Rng rng(2024);
    FixedPolicySource src(game, defect);
    int n = 10000, hits = 0;
    for (int k = 0; k < n; ++k) {
      Trajectory traj = sample_episode(game, src, nullptr, rng);
      hits += traj.steps[0].next_state == 1;
    }
    double freq = static_cast<double>(hits) / n;
    double sigma = std::sqrt(0.9 * 0.1 / n);
    CHECK(std::abs(freq - 0.9) <= 3 * sigma);
  }
}

TEST_CASE("visit probabilities identify reachable states") {
  MarkovGameSpec game = case_mg();
  auto visit = visit_probabilities(game, case2_target());
  CHECK(visit[0] == doctest::Approx(1.0));
  CHECK(visit[1] == doctest::Approx(0.0));
  CHECK(visit[2] == doctest::Approx(0.0));
  CHECK(visit[3 + 0] == doctest::Approx(0.0));
  CHECK(visit[3 + 1] == doctest::Approx(0.1));
  CHECK(visit[3 + 2] == doctest::Approx(0.9));
}

TEST_SUITE_END();
