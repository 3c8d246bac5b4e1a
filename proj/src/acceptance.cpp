#include "mga/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mga/attacks.hpp"
#include "mga/bandit.hpp"
#include "mga/conditions.hpp"
#include "mga/dp.hpp"
#include "mga/exploration.hpp"
#include "mga/fixtures.hpp"
#include "mga/metrics.hpp"
#include "mga/post_attack.hpp"
#include "mga/runner.hpp"
#include "mga/schedule.hpp"
#include "mga/spec_io.hpp"
#include "mga/testing/brute_force.hpp"
#include "mga/vlearning.hpp"

namespace mga {
namespace {

std::string format(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

// Mean of the first and last tenth of a per-episode series.
struct DecileRatio {
  double first = 0.0;
  double last = 0.0;
  double ratio() const { return first > 0.0 ? last / first : 0.0; }
};

DecileRatio decile_ratio(std::span<const double> series) {
  std::int64_t n = static_cast<std::int64_t>(series.size());
  std::int64_t d = std::max<std::int64_t>(n / 10, 1);
  DecileRatio out;
  for (std::int64_t k = 0; k < d; ++k) out.first += series[k];
  for (std::int64_t k = n - d; k < n; ++k) out.last += series[k];
  out.first /= d;
  out.last /= d;
  return out;
}

ExperimentConfig base_config(const std::string& fixture, AttackKind kind,
                             std::int64_t episodes,
                             std::vector<unsigned> seeds) {
  ExperimentConfig cfg;
  cfg.fixture = fixture;
  cfg.attack = kind;
  cfg.episodes = episodes;
  cfg.seeds = std::move(seeds);
  return cfg;
}

// Pools per-episode increments across seeds and applies the decile test.
struct PooledDeciles {
  DecileRatio cost, loss1;
};
PooledDeciles pooled_deciles(const std::vector<RunResult>& runs) {
  PooledDeciles out;
  for (const RunResult& r : runs) {
    DecileRatio c = decile_ratio(r.log.cost_increments());
    DecileRatio l = decile_ratio(r.log.loss1_increments());
    out.cost.first += c.first;
    out.cost.last += c.last;
    out.loss1.first += l.first;
    out.loss1.last += l.last;
  }
  return out;
}

// ---------------------------------------------------------------------------
// 1. DP oracle equivalence.

CriterionResult criterion_dp_oracle() {
  CriterionResult res{"1", "dp-oracle", true, ""};
  Rng rng(20240001);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    MarkovGameSpec spec = oracle::random_spec(rng, 3, 2, 2, 2);
    ProductPolicy pi = oracle::random_policy(spec, rng);
    ValueTables vt = evaluate_policy(spec, pi);
    for (int i = 0; i < spec.num_agents; ++i) {
      for (int s = 0; s < spec.num_states; ++s) {
        worst = std::max(worst, std::abs(vt.value(i, 0, s) -
                                         oracle::value_from(spec, pi, i, 0, s)));
      }
      BestResponseResult br = best_response(spec, i, pi);
      for (int s = 0; s < spec.num_states; ++s) {
        worst = std::max(
            worst, std::abs(br.values.value(0, 0, s) -
                            oracle::best_response_value(spec, i, pi, s)));
      }
    }
  }
  res.pass = worst <= 1e-12;
  res.detail = format("max |DP - enumeration| = %.3g (tol 1e-12), 50 specs",
                      worst);
  return res;
}

// ---------------------------------------------------------------------------
// 2. Post-attack equilibrium: each attack makes its target an exact NE with
// a quantified deviation margin.

struct AttackUnderTest {
  std::string name;
  MarkovAttackModel model;
  double bound;
};

CriterionResult criterion_post_attack_equilibrium() {
  CriterionResult res{"2", "post-attack-equilibrium", true, ""};
  MarkovGameSpec game = case_mg();
  DeterministicJointPolicy target = case2_target();
  ProductPolicy target_product = to_product(game, target);
  const int S = game.num_states, H = game.horizon;
  const int A = game.num_joint_actions();

  Condition1Report c1 = check_condition1(game, target);
  double eta = 0.05;
  DPortionAttack dp(game, target);
  EtaGapAttack eg(game, target, eta);
  MixedAttack mx(game, target);
  std::vector<AttackUnderTest> attacks;
  attacks.push_back({"d_portion", dp.markov_model(),
                     c1.delta_min / (2.0 * game.num_agents)});
  attacks.push_back({"eta_gap", eg.markov_model(), eta});
  attacks.push_back({"mixed", mx.markov_model(),
                     min_target_reward(game, target)});

  std::vector<double> visit = visit_probabilities(game, target);
  std::ostringstream detail;
  for (const AttackUnderTest& at : attacks) {
    MarkovGameSpec attacked = post_attack_env(game, at.model);

    double target_gap = 0.0;
    for (double g : ne_gap(attacked, target_product)) {
      target_gap = std::max(target_gap, std::abs(g));
    }

    // Every deviating deterministic product policy, judged at its latest
    // deviating reachable (h, s): the step-h equilibrium gap there must
    // clear the attack's margin.
    double min_gap = std::numeric_limits<double>::infinity();
    DeterministicJointPolicy pi{H, S,
                                std::vector<int>(static_cast<std::size_t>(H) *
                                                 S)};
    const std::int64_t total = static_cast<std::int64_t>(std::pow(A, H * S));
    for (std::int64_t code = 0; code < total; ++code) {
      std::int64_t rest = code;
      for (int c = 0; c < H * S; ++c) {
        pi.joint[c] = static_cast<int>(rest % A);
        rest /= A;
      }
      int h_latest = -1;
      for (int h = 0; h < H; ++h) {
        for (int s = 0; s < S; ++s) {
          if (is_reachable(visit, S, h, s) && pi.at(h, s) != target.at(h, s)) {
            h_latest = std::max(h_latest, h);
          }
        }
      }
      if (h_latest < 0) continue;  // only unreachable deviations

      ProductPolicy pi_product = to_product(game, pi);
      ValueTables under_pi = evaluate_policy(attacked, pi_product);
      std::vector<BestResponseResult> brs;
      brs.reserve(game.num_agents);
      for (int i = 0; i < game.num_agents; ++i) {
        brs.push_back(best_response(attacked, i, pi_product));
      }
      for (int s = 0; s < S; ++s) {
        if (!is_reachable(visit, S, h_latest, s)) continue;
        if (pi.at(h_latest, s) == target.at(h_latest, s)) continue;
        double gap = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < game.num_agents; ++i) {
          gap = std::max(gap, brs[i].values.value(0, h_latest, s) -
                                  under_pi.value(i, h_latest, s));
        }
        min_gap = std::min(min_gap, gap);
      }
    }

    bool ok = target_gap <= 1e-9 && min_gap >= at.bound - 1e-9;
    res.pass = res.pass && ok;
    detail << at.name << ": target gap " << format("%.2e", target_gap)
           << ", min deviation gap " << format("%.6f", min_gap) << " vs bound "
           << format("%.6f", at.bound) << (ok ? " ok" : " FAIL") << "; ";
  }
  res.detail = detail.str();
  return res;
}

// ---------------------------------------------------------------------------
// 3. Sublinear cost and loss under the attacks that should succeed.

CriterionResult sublinearity(const std::string& id, const std::string& suite,
                             const std::vector<ExperimentConfig>& configs) {
  CriterionResult res{id, suite, true, ""};
  std::ostringstream detail;
  for (const ExperimentConfig& cfg : configs) {
    ResolvedExperiment exp = resolve_experiment(cfg);
    std::vector<RunResult> runs = run_experiment(exp, /*write_files=*/false);
    PooledDeciles pooled = pooled_deciles(runs);
    bool ok = pooled.cost.ratio() <= 0.3 && pooled.loss1.ratio() <= 0.3;
    res.pass = res.pass && ok;
    detail << cfg.fixture << "/" << to_string(cfg.attack) << "(" << cfg.target
           << "): cost ratio " << format("%.4f", pooled.cost.ratio())
           << ", loss1 ratio " << format("%.4f", pooled.loss1.ratio())
           << " (need <= 0.3)" << (ok ? " ok" : " FAIL") << "; ";
  }
  res.detail = detail.str();
  return res;
}

CriterionResult criterion_sublinearity_mixed() {
  std::vector<ExperimentConfig> configs;
  for (const char* target : {"case1", "case2"}) {
    ExperimentConfig cfg = base_config("case_mg", AttackKind::kMixed, 200000,
                                       {1, 2, 3, 4, 5});
    cfg.target = target;
    configs.push_back(cfg);
  }
  return sublinearity("3a", "sublinearity-mixed", configs);
}

CriterionResult criterion_sublinearity_whitebox() {
  std::vector<ExperimentConfig> configs;
  {
    ExperimentConfig cfg = base_config("case_mg", AttackKind::kDPortion,
                                       200000, {1, 2, 3, 4, 5});
    cfg.target = "case2";
    configs.push_back(cfg);
  }
  {
    ExperimentConfig cfg = base_config("case_mg", AttackKind::kEtaGap, 200000,
                                       {1, 2, 3, 4, 5});
    cfg.target = "case2";
    // The attacker picks the largest admissible margin (eta_max for this
    // target); smaller margins shrink the per-step dominance gap eta/H and
    // slow the agents' separation accordingly.
    cfg.eta = 0.1;
    configs.push_back(cfg);
  }
  return sublinearity("3b", "sublinearity-whitebox", configs);
}

// ---------------------------------------------------------------------------
// 4. Limitation reproduction on the case-1 target.

CriterionResult criterion_limitations() {
  CriterionResult res{"4", "limitations", true, ""};
  MarkovGameSpec game = case_mg();
  std::ostringstream detail;

  bool dp_rejected = false, eg_rejected = false;
  try {
    DPortionAttack attack(game, case1_target());
  } catch (const ConditionViolated&) {
    dp_rejected = true;
  }
  try {
    EtaGapAttack attack(game, case1_target(), 0.05);
  } catch (const ConditionViolated&) {
    eg_rejected = true;
  }
  res.pass = dp_rejected && eg_rejected;
  detail << "condition checks reject d_portion=" << dp_rejected
         << " eta_gap=" << eg_rejected << "; ";

  ExperimentConfig cfg = base_config("case_mg", AttackKind::kNaiveReward,
                                     100000, {1, 2, 3, 4, 5});
  cfg.target = "case1";
  ResolvedExperiment exp = resolve_experiment(cfg);
  std::vector<RunResult> runs = run_experiment(exp, false);
  PooledDeciles pooled = pooled_deciles(runs);
  bool linear = pooled.cost.ratio() >= 0.5;
  res.pass = res.pass && linear;
  detail << "naive reward attack cost ratio "
         << format("%.4f", pooled.cost.ratio()) << " (need >= 0.5)"
         << (linear ? " ok" : " FAIL");
  res.detail = detail.str();
  return res;
}

// ---------------------------------------------------------------------------
// 5. Exploration identification gap on the recycling robots.

CriterionResult criterion_exploration_gap() {
  CriterionResult res{"5", "exploration-gap", true, ""};
  MarkovGameSpec spec = recycling_robots();
  std::vector<double> r_dagger = recycling_reward_r1();
  JointOptimum opt = joint_optimum(spec, r_dagger);
  const std::int64_t tau = 5000;
  const double delta = 0.05;
  double bound = identification_bound(spec, tau, delta);

  int good = 0;
  double worst_gap = 0.0;
  for (unsigned seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    DeterministicJointPolicy learned =
        exploration_phase(spec, r_dagger, tau, delta, rng);
    std::vector<double> v = evaluate_under_reward(spec, learned, r_dagger);
    double gap = 0.0;
    for (int s = 0; s < spec.num_states; ++s) {
      gap += spec.initial_dist[s] * (opt.value(0, s) - v[s]);
    }
    worst_gap = std::max(worst_gap, gap);
    good += gap <= bound;
  }
  res.pass = good >= 19;
  res.detail = format("gap <= %.3f in %d/20 seeds (worst gap %.4f)", bound,
                      good, worst_gap);
  return res;
}

// ---------------------------------------------------------------------------
// 6. FTRL weighted external regret envelope.

CriterionResult criterion_ftrl_regret() {
  CriterionResult res{"6", "ftrl-regret", true, ""};
  const double delta = 0.05;
  const std::vector<std::int64_t> horizons_t = {100, 1000, 10000};
  std::ostringstream detail;

  for (int B : {2, 4}) {
    for (int H : {1, 4}) {
      for (int seq = 0; seq < 2; ++seq) {
        // Fixed loss sequences: seeded iid and block-switching best arm.
        std::vector<std::vector<double>> losses(10000,
                                                std::vector<double>(B));
        Rng sequence_rng(555);
        for (std::int64_t t = 0; t < 10000; ++t) {
          for (int b = 0; b < B; ++b) {
            if (seq == 0) {
              losses[t][b] = uniform01(sequence_rng);
            } else {
              losses[t][b] = (b == (t / 500) % B) ? 0.1 : 0.9;
            }
          }
        }

        std::vector<int> pass_count(horizons_t.size(), 0);
        for (unsigned trial = 0; trial < 100; ++trial) {
          Rng rng(31000 + trial);
          ExpWeightsBandit bandit(B, H);
          // Incremental alpha-weighted sums: alpha_t^j = (alpha_j/G_j) G_t.
          double g = 1.0;
          double incurred_scaled = 0.0;
          std::vector<double> arm_scaled(B, 0.0);
          std::size_t checkpoint = 0;
          for (std::int64_t t = 1; t <= 10000 && checkpoint < horizons_t.size();
               ++t) {
            g = g_step(H, t, g);
            double scale = alpha_t(H, t) / g;
            auto theta = bandit.distribution();
            for (int b = 0; b < B; ++b) {
              incurred_scaled += scale * theta[b] * losses[t - 1][b];
              arm_scaled[b] += scale * losses[t - 1][b];
            }
            int arm = bandit.sample(rng);
            bandit.update(arm, losses[t - 1][arm]);
            if (t == horizons_t[checkpoint]) {
              double best =
                  *std::min_element(arm_scaled.begin(), arm_scaled.end());
              double regret = g * (incurred_scaled - best);
              double bound =
                  10.0 * std::sqrt(H * B * std::log(B / delta) / t);
              pass_count[checkpoint] += regret <= bound;
              ++checkpoint;
            }
          }
        }
        for (std::size_t c = 0; c < horizons_t.size(); ++c) {
          bool ok = pass_count[c] >= 95;
          res.pass = res.pass && ok;
          if (!ok) {
            detail << format("B=%d H=%d seq=%d t=%lld: %d/100 FAIL; ", B, H,
                             seq, static_cast<long long>(horizons_t[c]),
                             pass_count[c]);
          }
        }
      }
    }
  }
  if (res.pass) {
    detail << "all (B, H, sequence, t) combinations >= 95/100 under the "
              "10*sqrt(HB log(B/delta)/t) envelope";
  }
  res.detail = detail.str();
  return res;
}

// ---------------------------------------------------------------------------
// 7. Approximate mixed attack end to end on the recycling robots.

CriterionResult criterion_approx_mixed() {
  CriterionResult res{"7", "approx-mixed-e2e", true, ""};
  const std::int64_t K = 100000;
  ExperimentConfig cfg = base_config("recycling_robots",
                                     AttackKind::kApproxMixed, K, {1, 2, 3});
  cfg.attacker_reward = "r1";
  cfg.tau = static_cast<std::int64_t>(std::pow(static_cast<double>(K),
                                               2.0 / 3.0));
  cfg.delta = 0.05;
  cfg.eval_stride = 100;
  ResolvedExperiment exp = resolve_experiment(cfg);
  std::vector<RunResult> runs = run_experiment(exp, false);

  std::ostringstream detail;
  detail << format("tau=%lld; ", static_cast<long long>(cfg.tau));
  DecileRatio cost_pool, loss2_pool;
  for (const RunResult& r : runs) {
    DecileRatio c = decile_ratio(r.log.cost_increments());
    DecileRatio l2 = decile_ratio(r.log.loss2_values());
    cost_pool.first += c.first;
    cost_pool.last += c.last;
    loss2_pool.first += l2.first;
    loss2_pool.last += l2.last;
    bool gap_ok = r.learned_gap <= r.identification_bound;
    res.pass = res.pass && gap_ok;
    detail << format("seed %u: learned gap %.4f vs bound %.3f%s; ", r.seed,
                     r.learned_gap, r.identification_bound, gap_ok ? "" : " FAIL");
  }
  bool cost_ok = cost_pool.ratio() <= 0.5;
  bool loss2_ok = loss2_pool.ratio() <= 0.5;
  res.pass = res.pass && cost_ok && loss2_ok;
  detail << format("cost ratio %.4f, loss2 ratio %.4f (need <= 0.5)%s",
                   cost_pool.ratio(), loss2_pool.ratio(),
                   cost_ok && loss2_ok ? "" : " FAIL");
  res.detail = detail.str();
  return res;
}

// ---------------------------------------------------------------------------
// 8. Metrics identities.

CriterionResult criterion_metrics_identities(const std::string& scratch) {
  CriterionResult res{"8", "metrics-identities", true, ""};
  std::ostringstream detail;
  namespace fs = std::filesystem;

  // Loss2 <= H * Loss1 on shared policy snapshots, with the mixed attack
  // steering toward the attacker-optimal target.
  {
    MarkovGameSpec spec = recycling_robots();
    std::vector<double> r_dagger = recycling_reward_r1();
    JointOptimum opt = joint_optimum(spec, r_dagger);
    MixedAttack attack(spec, opt.policy);
    VLearningTeam team(spec, 1.0,
                       std::log(3.0 * 6 * 8 * 8 * 4000 / 0.05));
    Rng rng(11);
    bool ok = true;
    double cum_l2 = 0.0, cum_l1 = 0.0;
    for (int k = 1; k <= 4000 && ok; ++k) {
      team.begin_episode(k);
      attack.episode_begin(k);
      bool ckpt = (k - 1) % 100 == 0;
      ProductPolicy pik;
      if (ckpt) pik = team.current_policy();
      Trajectory traj = sample_episode(spec, team, &attack, rng);
      attack.episode_end(traj);
      if (ckpt) {
        double l2 = loss2_gap(spec, r_dagger, opt, pik, traj.initial_state());
        double l1 = expected_loss1(spec, pik, opt.policy,
                                   traj.initial_state());
        cum_l2 += l2;
        cum_l1 += l1;
        ok = l2 <= spec.horizon * l1 + 1e-9 &&
             cum_l2 <= spec.horizon * cum_l1 + 1e-9;
      }
    }
    res.pass = res.pass && ok;
    detail << "Loss2 <= H*Loss1 at every checkpoint: "
           << (ok ? "ok" : "FAIL") << "; ";
  }

  // Untouched episodes cost exactly zero.
  {
    ExperimentConfig cfg =
        base_config("case_mg", AttackKind::kNone, 500, {3});
    ResolvedExperiment exp = resolve_experiment(cfg);
    RunResult run = run_one(exp, 3, false);
    bool ok = run.log.total_cost() == 0.0;
    res.pass = res.pass && ok;
    detail << "no-attack cost == 0: " << (ok ? "ok" : "FAIL") << "; ";
  }

  // Byte-identical CSVs for repeated seeded runs.
  {
    ExperimentConfig cfg =
        base_config("case_mg", AttackKind::kMixed, 2000, {7});
    cfg.target = "case2";
    cfg.attacker_reward = "agent:0";
    cfg.eval_stride = 50;
    auto read_all = [](const std::string& p) {
      std::ifstream in(p, std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      return buf.str();
    };
    cfg.out_dir = (fs::path(scratch) / "rerun_a").string();
    ResolvedExperiment exp_a = resolve_experiment(cfg);
    RunResult a = run_one(exp_a, 7, true);
    cfg.out_dir = (fs::path(scratch) / "rerun_b").string();
    ResolvedExperiment exp_b = resolve_experiment(cfg);
    RunResult b = run_one(exp_b, 7, true);
    std::string bytes_a = read_all(a.csv_path);
    std::string bytes_b = read_all(b.csv_path);
    bool ok = !bytes_a.empty() && bytes_a == bytes_b;
    res.pass = res.pass && ok;
    detail << "byte-identical CSVs: " << (ok ? "ok" : "FAIL");
  }

  res.detail = detail.str();
  return res;
}

}  // namespace

std::vector<std::string> acceptance_suite_names() {
  return {"dp-oracle",         "post-attack-equilibrium",
          "sublinearity-mixed", "sublinearity-whitebox",
          "limitations",        "exploration-gap",
          "ftrl-regret",        "approx-mixed-e2e",
          "metrics-identities", "all"};
}

std::vector<CriterionResult> run_acceptance_suite(
    const std::string& suite, const std::string& scratch_dir) {
  std::vector<CriterionResult> out;
  bool all = suite == "all";
  bool known = all;
  auto want = [&](const char* name) {
    if (all || suite == name) {
      known = true;
      return true;
    }
    return false;
  };

  if (want("dp-oracle")) out.push_back(criterion_dp_oracle());
  if (want("post-attack-equilibrium")) {
    out.push_back(criterion_post_attack_equilibrium());
  }
  if (want("sublinearity-mixed")) out.push_back(criterion_sublinearity_mixed());
  if (want("sublinearity-whitebox")) {
    out.push_back(criterion_sublinearity_whitebox());
  }
  if (want("limitations")) out.push_back(criterion_limitations());
  if (want("exploration-gap")) out.push_back(criterion_exploration_gap());
  if (want("ftrl-regret")) out.push_back(criterion_ftrl_regret());
  if (want("approx-mixed-e2e")) out.push_back(criterion_approx_mixed());
  if (want("metrics-identities")) {
    out.push_back(criterion_metrics_identities(scratch_dir));
  }
  if (!known) throw ConfigError("unknown acceptance suite '" + suite + "'");
  return out;
}

}  // namespace mga
