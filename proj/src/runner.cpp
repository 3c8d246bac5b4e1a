#include "mga/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <thread>

#include <json.hpp>

#include "mga/attacks.hpp"
#include "mga/conditions.hpp"
#include "mga/exploration.hpp"
#include "mga/fixtures.hpp"
#include "mga/post_attack.hpp"
#include "mga/spec_io.hpp"
#include "mga/vlearning.hpp"

namespace mga {

using nlohmann::json;

namespace {

bool needs_target(AttackKind kind) {
  return kind == AttackKind::kDPortion || kind == AttackKind::kEtaGap ||
         kind == AttackKind::kMixed || kind == AttackKind::kNaiveReward;
}

std::vector<double> resolve_attacker_reward(const MarkovGameSpec& spec,
                                            const std::string& name) {
  if (name == "r1") return agent_reward_tensor(spec, 0);
  if (name == "anti23") {
    if (spec.num_agents < 3) {
      throw ConfigError("attacker reward 'anti23' needs three agents");
    }
    const int S = spec.num_states, A = spec.num_joint_actions();
    std::vector<double> out(static_cast<std::size_t>(spec.horizon) * S * A);
    for (int h = 0; h < spec.horizon; ++h) {
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
          out[(static_cast<std::size_t>(h) * S + s) * A + a] =
              1.0 - spec.reward(1, h, s, a) / 2.0 -
              spec.reward(2, h, s, a) / 2.0;
        }
      }
    }
    return out;
  }
  if (name.rfind("agent:", 0) == 0) {
    int agent = std::stoi(name.substr(6));
    if (agent < 0 || agent >= spec.num_agents) {
      throw ConfigError("attacker reward agent index out of range");
    }
    return agent_reward_tensor(spec, agent);
  }
  return load_reward_tensor(name, spec);
}

double expected_gap_from_p0(const MarkovGameSpec& spec,
                            const JointOptimum& opt,
                            std::span<const double> reward,
                            const DeterministicJointPolicy& pi) {
  std::vector<double> v = evaluate_under_reward(spec, pi, reward);
  double gap = 0.0;
  for (int s = 0; s < spec.num_states; ++s) {
    gap += spec.initial_dist[s] * (opt.value(0, s) - v[s]);
  }
  return gap;
}

double max_gap_over_support(const MarkovGameSpec& spec,
                            const std::vector<double>& gap) {
  double g = 0.0;
  for (int s = 0; s < spec.num_states; ++s) {
    if (spec.initial_dist[s] > 0.0) g = std::max(g, gap[s]);
  }
  return g;
}

json policy_to_json(const MarkovGameSpec& spec,
                    const DeterministicJointPolicy& pi) {
  json out = json::array();
  for (int h = 0; h < pi.horizon; ++h) {
    json row = json::array();
    for (int s = 0; s < pi.num_states; ++s) {
      json own = json::array();
      for (int i = 0; i < spec.num_agents; ++i) {
        own.push_back(spec.agent_action(pi.at(h, s), i));
      }
      row.push_back(own);
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace

double identification_bound(const MarkovGameSpec& spec, std::int64_t tau,
                    double delta) {
  double H = spec.horizon, S = spec.num_states, A = spec.num_joint_actions();
  return 2.0 * H * H * S *
         std::sqrt(2.0 * A * std::log(2.0 * S * A * H * tau / delta) / tau);
}

ResolvedExperiment resolve_experiment(const ExperimentConfig& config) {
  ResolvedExperiment exp;
  exp.config = config;
  if (!config.fixture.empty()) {
    exp.spec = fixture_by_name(config.fixture,
                               config.noise_override.value_or(
                                   NoiseModel::bernoulli()));
  } else {
    exp.spec = load_spec(config.spec_path);
    if (config.noise_override) exp.spec.noise = *config.noise_override;
  }
  require_valid(exp.spec);

  if (!config.attacker_reward.empty()) {
    exp.attacker_reward =
        resolve_attacker_reward(exp.spec, config.attacker_reward);
    for (double v : exp.attacker_reward) {
      if (!(v > 0.0 && v <= 1.0)) {
        throw ConfigError("attacker rewards must lie in (0,1]");
      }
    }
    exp.attacker_optimum = joint_optimum(exp.spec, exp.attacker_reward);
  }

  if (!config.target.empty()) {
    if (config.target == "case1" || config.target == "case2") {
      if (config.fixture != "case_mg") {
        throw ConfigError("targets case1/case2 belong to the case_mg fixture");
      }
      exp.target = config.target == "case1" ? case1_target() : case2_target();
    } else if (config.target == "optimal") {
      if (!exp.attacker_optimum) {
        throw ConfigError("target 'optimal' needs an attacker reward");
      }
      exp.target = exp.attacker_optimum->policy;
    } else {
      exp.target = load_policy(config.target, exp.spec);
    }
  }

  if (needs_target(config.attack) && !exp.target) {
    throw ConfigError(to_string(config.attack) + " attack needs a target");
  }
  if (config.attack == AttackKind::kApproxMixed &&
      exp.attacker_reward.empty()) {
    throw ConfigError("approx_mixed attack needs an attacker reward");
  }
  return exp;
}

std::unique_ptr<AttackHooks> make_attack(const ResolvedExperiment& exp) {
  switch (exp.config.attack) {
    case AttackKind::kNone:
      return nullptr;
    case AttackKind::kDPortion:
      return std::make_unique<DPortionAttack>(exp.spec, *exp.target);
    case AttackKind::kEtaGap:
      return std::make_unique<EtaGapAttack>(exp.spec, *exp.target,
                                            exp.config.eta);
    case AttackKind::kMixed:
      return std::make_unique<MixedAttack>(exp.spec, *exp.target);
    case AttackKind::kNaiveReward:
      return std::make_unique<TargetMeanRewardAttack>(exp.spec, *exp.target);
    case AttackKind::kApproxMixed:
      return std::make_unique<ApproximateMixedAttack>(
          exp.spec, exp.config.tau, exp.config.delta);
  }
  throw ConfigError("unhandled attack kind");
}

RunResult run_one(const ResolvedExperiment& exp, unsigned seed,
                  bool write_files) {
  const ExperimentConfig& cfg = exp.config;
  const MarkovGameSpec& spec = exp.spec;
  RunResult result;
  result.seed = seed;

  int max_actions = 1;
  for (int a : spec.actions_per_agent) max_actions = std::max(max_actions, a);
  double iota = std::log(static_cast<double>(spec.num_agents) * spec.horizon *
                         spec.num_states * max_actions * cfg.episodes /
                         cfg.agent_delta);
  VLearningTeam team(spec, cfg.beta_c, iota);
  std::unique_ptr<AttackHooks> hooks = make_attack(exp);
  Rng rng(seed);

  const bool feed_attacker = cfg.attack == AttackKind::kApproxMixed;
  std::span<const double> r_dagger_feed =
      feed_attacker ? std::span<const double>(exp.attacker_reward)
                    : std::span<const double>();

  const bool track_loss2 = !exp.attacker_reward.empty();
  std::optional<HindsightRegretTracker> regret;
  if (cfg.track_hindsight_regret) {
    regret.emplace(spec);
  }

  for (std::int64_t k = 1; k <= cfg.episodes; ++k) {
    team.begin_episode(k);
    if (hooks) hooks->episode_begin(k);
    bool at_checkpoint = (k - 1) % cfg.eval_stride == 0;
    ProductPolicy pik;
    if (at_checkpoint && (track_loss2 || regret)) {
      pik = team.current_policy();
    }
    Trajectory traj = sample_episode(spec, team, hooks.get(), rng,
                                     r_dagger_feed);
    if (hooks) hooks->episode_end(traj);

    if (at_checkpoint && track_loss2) {
      result.log.set_loss2(loss2_gap(spec, exp.attacker_reward,
                                     *exp.attacker_optimum, pik,
                                     traj.initial_state()));
    }
    if (at_checkpoint && regret) {
      regret->add_snapshot(pik, static_cast<double>(cfg.eval_stride));
      double worst = 0.0;
      for (int i = 0; i < spec.num_agents; ++i) {
        worst = std::max(worst, regret->current(i));
      }
      result.log.set_regret(worst);
    }
    const DeterministicJointPolicy* loss_target =
        hooks ? hooks->current_target()
              : (exp.target ? &*exp.target : nullptr);
    result.log.add_episode(accumulate(spec, traj, loss_target));
  }

  // Exact-DP summary of where the run ended up.
  std::optional<MarkovAttackModel> model;
  const DeterministicJointPolicy* effective_target =
      exp.target ? &*exp.target : nullptr;
  switch (cfg.attack) {
    case AttackKind::kDPortion:
      model = static_cast<DPortionAttack*>(hooks.get())->markov_model();
      break;
    case AttackKind::kEtaGap:
      model = static_cast<EtaGapAttack*>(hooks.get())->markov_model();
      break;
    case AttackKind::kMixed:
      model = static_cast<MixedAttack*>(hooks.get())->markov_model();
      break;
    case AttackKind::kNaiveReward:
      model = static_cast<TargetMeanRewardAttack*>(hooks.get())->markov_model();
      break;
    case AttackKind::kApproxMixed: {
      auto* attack = static_cast<ApproximateMixedAttack*>(hooks.get());
      if (!attack->exploring()) {
        result.learned_target = attack->learned_target();
        effective_target = &*result.learned_target;
        model = MixedAttack(spec, *result.learned_target).markov_model();
        result.learned_gap = expected_gap_from_p0(
            spec, *exp.attacker_optimum, exp.attacker_reward,
            *result.learned_target);
        result.identification_bound = identification_bound(spec, cfg.tau, cfg.delta);
      }
      break;
    }
    case AttackKind::kNone:
      break;
  }
  if (model) {
    MarkovGameSpec attacked = post_attack_env(spec, *model);
    if (effective_target) {
      result.target_gap_post_attack = max_gap_over_support(
          spec, ne_gap(attacked, to_product(spec, *effective_target)));
    }
    result.final_policy_gap_post_attack =
        max_gap_over_support(spec, ne_gap(attacked, team.current_policy()));
  }

  if (write_files) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    std::string stem = (cfg.fixture.empty() ? "spec" : cfg.fixture) + "_" +
                       to_string(cfg.attack) + "_seed" + std::to_string(seed);
    result.csv_path = (fs::path(cfg.out_dir) / (stem + ".csv")).string();
    result.report_path = (fs::path(cfg.out_dir) / (stem + ".json")).string();
    result.log.write_csv(result.csv_path);

    json report;
    report["fixture"] = cfg.fixture.empty() ? cfg.spec_path : cfg.fixture;
    report["attack"] = to_string(cfg.attack);
    report["seed"] = seed;
    report["episodes"] = cfg.episodes;
    report["eval_stride"] = cfg.eval_stride;
    report["totals"] = {{"cost", result.log.total_cost()},
                        {"loss1", result.log.total_loss1()},
                        {"loss2", result.log.total_loss2()}};
    if (cfg.attack == AttackKind::kEtaGap) report["eta"] = cfg.eta;
    if (cfg.attack == AttackKind::kApproxMixed) {
      report["tau"] = cfg.tau;
      report["delta"] = cfg.delta;
    }
    if (exp.target) {
      Condition1Report c1 = check_condition1(spec, *exp.target);
      Condition2Report c2 = check_condition2(
          spec, *exp.target, cfg.eta > 0.0 ? cfg.eta : 0.05);
      report["condition1"] = {{"holds", c1.holds},
                              {"delta_min", c1.delta_min},
                              {"step_dominance", c1.step_dominance}};
      report["condition2"] = {{"holds", c2.holds},
                              {"delta_r", c2.delta_r},
                              {"eta_max", c2.eta_max}};
      report["r_min"] = min_target_reward(spec, *exp.target);
      report["target"] = policy_to_json(spec, *exp.target);
    }
    if (result.learned_target) {
      report["learned_target"] = policy_to_json(spec, *result.learned_target);
      report["learned_gap"] = result.learned_gap;
      report["identification_bound"] = result.identification_bound;
    }
    if (!std::isnan(result.target_gap_post_attack)) {
      report["target_gap_post_attack"] = result.target_gap_post_attack;
    }
    if (!std::isnan(result.final_policy_gap_post_attack)) {
      report["final_policy_gap_post_attack"] =
          result.final_policy_gap_post_attack;
    }
    std::ofstream out(result.report_path);
    if (!out) throw IoError("cannot write " + result.report_path);
    out << report.dump(2) << "\n";
  }
  return result;
}

std::vector<RunResult> run_experiment(const ResolvedExperiment& exp,
                                      bool write_files) {
  const auto& seeds = exp.config.seeds;
  std::vector<RunResult> results(seeds.size());
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers <= 1 || seeds.size() <= 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      results[i] = run_one(exp, seeds[i], write_files);
    }
    return results;
  }
  std::vector<std::future<RunResult>> futures;
  futures.reserve(seeds.size());
  for (unsigned seed : seeds) {
    futures.push_back(std::async(std::launch::async, [&exp, seed,
                                                      write_files] {
      return run_one(exp, seed, write_files);
    }));
  }
  for (std::size_t i = 0; i < futures.size(); ++i) {
    results[i] = futures[i].get();
  }
  return results;
}

void emit_plot_script(const std::vector<std::string>& csv_paths,
                      const std::string& out_path) {
  if (csv_paths.empty()) throw ConfigError("no CSV files to plot");
  std::ofstream out(out_path);
  if (!out) throw IoError("cannot write " + out_path);
  out << "#!/usr/bin/env python3\n"
      << "\"\"\"Cumulative attack cost and loss curves from run CSVs.\"\"\"\n"
      << "import csv\n"
      << "import os\n\n"
      << "import matplotlib\n"
      << "matplotlib.use(\"Agg\")\n"
      << "import matplotlib.pyplot as plt\n\n"
      << "FILES = [\n";
  for (const std::string& p : csv_paths) {
    out << "    " << json(p).dump() << ",\n";
  }
  out << "]\n\n"
      << "fig, axes = plt.subplots(1, 2, figsize=(11, 4))\n"
      << "for path in FILES:\n"
      << "    episodes, cost, loss1 = [], [], []\n"
      << "    with open(path) as fh:\n"
      << "        for row in csv.DictReader(fh):\n"
      << "            episodes.append(int(row[\"episode\"]))\n"
      << "            cost.append(float(row[\"cost_cum\"]))\n"
      << "            loss1.append(float(row[\"loss1_cum\"]))\n"
      << "    label = os.path.splitext(os.path.basename(path))[0]\n"
      << "    axes[0].plot(episodes, cost, label=label)\n"
      << "    axes[1].plot(episodes, loss1, label=label)\n"
      << "axes[0].set_xlabel(\"episode\")\n"
      << "axes[0].set_ylabel(\"cumulative cost\")\n"
      << "axes[1].set_xlabel(\"episode\")\n"
      << "axes[1].set_ylabel(\"cumulative loss1\")\n"
      << "for ax in axes:\n"
      << "    ax.legend(fontsize=7)\n"
      << "fig.tight_layout()\n"
      << "out_png = os.path.splitext(" << json(out_path).dump()
      << ")[0] + \".png\"\n"
      << "fig.savefig(out_png, dpi=150)\n"
      << "print(\"wrote\", out_png)\n";
}

}  // namespace mga
