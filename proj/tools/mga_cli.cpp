// Command-line driver for the Markov-game attack toolkit: seeded experiment
// runs, the acceptance suites, plot-script emission and fixture inspection.

#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mga/acceptance.hpp"
#include "mga/attacks.hpp"
#include "mga/conditions.hpp"
#include "mga/config.hpp"
#include "mga/dp.hpp"
#include "mga/errors.hpp"
#include "mga/fixtures.hpp"
#include "mga/runner.hpp"
#include "mga/spec_io.hpp"

namespace {

int cmd_run(const std::string& config_path, std::optional<unsigned> seed,
            const std::string& out_dir, std::optional<std::int64_t> stride) {
  mga::ExperimentConfig cfg = mga::load_config(config_path);
  if (seed) cfg.seeds = {*seed};
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (stride) cfg.eval_stride = *stride;
  mga::ResolvedExperiment exp = mga::resolve_experiment(cfg);
  std::vector<mga::RunResult> runs = mga::run_experiment(exp, true);
  for (const mga::RunResult& r : runs) {
    std::printf("seed %u: cost %.4f loss1 %.4f", r.seed, r.log.total_cost(),
                r.log.total_loss1());
    if (!exp.attacker_reward.empty()) {
      std::printf(" loss2 %.4f", r.log.total_loss2());
    }
    std::printf(" -> %s\n", r.csv_path.c_str());
  }
  return 0;
}

int cmd_acceptance(const std::string& suite, const std::string& scratch,
                   const std::string& json_path) {
  auto results = mga::run_acceptance_suite(suite, scratch);
  bool ok = true;
  for (const auto& r : results) {
    std::printf("[%s] criterion %s (%s): %s\n", r.pass ? "PASS" : "FAIL",
                r.id.c_str(), r.suite.c_str(), r.detail.c_str());
    ok = ok && r.pass;
  }
  if (!json_path.empty()) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : results) {
      out.push_back({{"criterion", r.id},
                     {"suite", r.suite},
                     {"pass", r.pass},
                     {"detail", r.detail}});
    }
    std::ofstream f(json_path);
    if (!f) throw mga::IoError("cannot write " + json_path);
    f << out.dump(2) << "\n";
  }
  return ok ? 0 : 5;
}

int cmd_inspect(const std::string& name, const std::string& save_path,
                const std::string& target_name, double eta) {
  mga::MarkovGameSpec spec = mga::fixture_by_name(name);
  mga::ValidationReport rep = mga::validate_spec(spec);
  std::printf("fixture %s: agents=%d states=%d horizon=%d joint_actions=%d\n",
              name.c_str(), spec.num_agents, spec.num_states, spec.horizon,
              spec.num_joint_actions());
  std::printf("validate: %s\n", rep.ok ? "ok" : rep.message.c_str());

  if (!target_name.empty()) {
    mga::DeterministicJointPolicy target;
    if (target_name == "case1") {
      target = mga::case1_target();
    } else if (target_name == "case2") {
      target = mga::case2_target();
    } else {
      target = mga::load_policy(target_name, spec);
    }
    mga::Condition1Report c1 = mga::check_condition1(spec, target);
    mga::Condition2Report c2 = mga::check_condition2(spec, target, eta);
    std::printf("condition1: holds=%d delta_min=%.6f step_dominance=%d\n",
                c1.holds, c1.delta_min, c1.step_dominance);
    std::printf("condition2(eta=%.3f): holds=%d delta_r=%.6f eta_max=%.6f\n",
                eta, c2.holds, c2.delta_r, c2.eta_max);
    std::printf("r_min(target)=%.6f\n", mga::min_target_reward(spec, target));
  }
  if (!save_path.empty()) {
    mga::save_spec(spec, save_path);
    std::printf("wrote %s\n", save_path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov-game poisoning-attack simulation toolkit"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a configured experiment");
  std::string config_path;
  std::string out_dir;
  std::optional<unsigned> seed;
  std::optional<std::int64_t> stride;
  run->add_option("--config", config_path, "experiment config (JSON)")
      ->required();
  run->add_option("--seed", seed, "override the config's seed list");
  run->add_option("--out", out_dir, "override the output directory");
  run->add_option("--stride", stride, "override the checkpoint stride");

  auto* acc = app.add_subcommand("acceptance", "run an acceptance suite");
  std::string suite = "all";
  std::string scratch = "acceptance_scratch";
  acc->add_option("suite", suite, "suite name (see --list)");
  acc->add_option("--scratch", scratch, "scratch directory for file checks");
  std::string verdicts_json;
  acc->add_option("--json", verdicts_json, "also write verdicts as JSON");
  bool list_suites = false;
  acc->add_flag("--list", list_suites, "list suite names");

  auto* plots = app.add_subcommand("emit-plots",
                                   "emit a matplotlib script for run CSVs");
  std::vector<std::string> csvs;
  std::string plot_out = "plot_runs.py";
  plots->add_option("csv", csvs, "input CSV files");
  plots->add_option("--out", plot_out, "output script path");

  auto* inspect = app.add_subcommand("inspect-fixture",
                                     "print a fixture summary");
  std::string fixture_name;
  std::string save_path;
  std::string target_name;
  double eta = 0.05;
  inspect->add_option("name", fixture_name, "fixture name")->required();
  inspect->add_option("--save", save_path, "write the spec file here");
  inspect->add_option("--target", target_name,
                      "condition reports for this target (case1/case2/path)");
  inspect->add_option("--eta", eta, "eta for the condition-2 report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, seed, out_dir, stride);
    if (*acc) {
      if (list_suites) {
        for (const auto& s : mga::acceptance_suite_names()) {
          std::printf("%s\n", s.c_str());
        }
        return 0;
      }
      return cmd_acceptance(suite, scratch, verdicts_json);
    }
    if (*plots) {
      mga::emit_plot_script(csvs, plot_out);
      std::printf("wrote %s\n", plot_out.c_str());
      return 0;
    }
    if (*inspect) return cmd_inspect(fixture_name, save_path, target_name, eta);
  } catch (const mga::ConditionViolated& e) {
    std::fprintf(stderr, "condition violated: %s\n", e.what());
    return 4;
  } catch (const mga::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const mga::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 3;
  } catch (const mga::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 6;
  }
  return 0;
}
