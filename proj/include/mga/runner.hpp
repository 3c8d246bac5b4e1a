#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mga/config.hpp"
#include "mga/dp.hpp"
#include "mga/metrics.hpp"
#include "mga/simulate.hpp"
#include "mga/types.hpp"

namespace mga {

// Config with every reference resolved: the game, the target policy and the
// attacker reward tensor (either may be absent depending on the attack).
struct ResolvedExperiment {
  ExperimentConfig config;
  MarkovGameSpec spec;
  std::optional<DeterministicJointPolicy> target;
  std::vector<double> attacker_reward;  // H*S*A, empty when unused
  std::optional<JointOptimum> attacker_optimum;
};

ResolvedExperiment resolve_experiment(const ExperimentConfig& config);

// Builds the configured attack's hooks; throws ConditionViolated when the
// strategy's applicability check fails (the run aborts at setup).
std::unique_ptr<AttackHooks> make_attack(const ResolvedExperiment& exp);

struct RunResult {
  unsigned seed = 0;
  MetricsLog log;
  std::optional<DeterministicJointPolicy> learned_target;  // black-box only
  double learned_gap = std::numeric_limits<double>::quiet_NaN();
  double identification_bound = std::numeric_limits<double>::quiet_NaN();
  double target_gap_post_attack = std::numeric_limits<double>::quiet_NaN();
  double final_policy_gap_post_attack =
      std::numeric_limits<double>::quiet_NaN();
  std::string csv_path;
  std::string report_path;
};

// One seeded run: K episodes of V-learning agents under the configured
// attack, with metrics and checkpointed exact-DP diagnostics. Deterministic
// given (config, seed).
RunResult run_one(const ResolvedExperiment& exp, unsigned seed,
                  bool write_files);

// All seeds of a config (parallel across seeds), plus file emission when
// write_files is set.
std::vector<RunResult> run_experiment(const ResolvedExperiment& exp,
                                      bool write_files);

// Emits a self-contained matplotlib script overlaying the cumulative cost
// and loss series of the given CSVs. Errors on an empty list.
void emit_plot_script(const std::vector<std::string>& csv_paths,
                      const std::string& out_path);

// 2 H^2 S sqrt(2 A log(2 S A H tau / delta) / tau): the identification-gap
// guarantee of the exploration phase.
double identification_bound(const MarkovGameSpec& spec, std::int64_t tau,
                    double delta);

}  // namespace mga
