#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mga/types.hpp"

namespace mga {

enum class AttackKind {
  kNone,
  kDPortion,
  kEtaGap,
  kMixed,
  kNaiveReward,
  kApproxMixed,
};

AttackKind attack_kind_from_string(const std::string& name);
std::string to_string(AttackKind kind);

// One experiment: a fixture (or spec file), an attack, an episode budget and
// seeds. Parsed from a JSON file; see README for the schema.
struct ExperimentConfig {
  std::string fixture;    // one of fixture_names(), or empty when spec_path set
  std::string spec_path;
  std::optional<NoiseModel> noise_override;

  AttackKind attack = AttackKind::kNone;
  double eta = 0.05;
  std::int64_t tau = 1000;
  double delta = 0.05;
  // "case1" | "case2" | "optimal" | a policy file path; may stay empty for
  // target-free attacks.
  std::string target;
  // "r1" | "anti23" | "agent:<i>" | a reward-tensor file path.
  std::string attacker_reward;

  std::int64_t episodes = 200000;  // desk-scale default
  std::vector<unsigned> seeds = {1};
  std::int64_t eval_stride = 100;
  std::string out_dir = "out";
  bool track_hindsight_regret = false;

  double beta_c = 1.0;        // V-learning bonus scale
  double agent_delta = 0.05;  // delta inside the agents' iota term
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_json(const std::string& text,
                                   const std::string& name);

}  // namespace mga
