#include "mga/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mga/errors.hpp"

namespace mga {

using nlohmann::json;

AttackKind attack_kind_from_string(const std::string& name) {
  if (name == "none") return AttackKind::kNone;
  if (name == "d_portion") return AttackKind::kDPortion;
  if (name == "eta_gap") return AttackKind::kEtaGap;
  if (name == "mixed") return AttackKind::kMixed;
  if (name == "naive_reward") return AttackKind::kNaiveReward;
  if (name == "approx_mixed") return AttackKind::kApproxMixed;
  throw ConfigError("unknown attack kind '" + name + "'");
}

std::string to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::kNone: return "none";
    case AttackKind::kDPortion: return "d_portion";
    case AttackKind::kEtaGap: return "eta_gap";
    case AttackKind::kMixed: return "mixed";
    case AttackKind::kNaiveReward: return "naive_reward";
    case AttackKind::kApproxMixed: return "approx_mixed";
  }
  return "?";
}

ExperimentConfig parse_config_json(const std::string& text,
                                   const std::string& name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(name + ": " + e.what());
  }

  ExperimentConfig cfg;
  try {
    cfg.fixture = j.value("fixture", "");
    cfg.spec_path = j.value("spec_path", "");
    if (j.contains("noise")) {
      std::string kind = j["noise"].get<std::string>();
      if (kind == "bernoulli") {
        cfg.noise_override = NoiseModel::bernoulli();
      } else if (kind == "gaussian") {
        cfg.noise_override =
            NoiseModel::clamped_gaussian(j.value("noise_sigma", 0.05));
      } else {
        throw ConfigError(name + ": unknown noise '" + kind + "'");
      }
    }
    if (j.contains("attack")) {
      const json& a = j["attack"];
      cfg.attack = attack_kind_from_string(a.value("kind", "none"));
      cfg.eta = a.value("eta", cfg.eta);
      cfg.tau = a.value("tau", cfg.tau);
      cfg.delta = a.value("delta", cfg.delta);
      cfg.target = a.value("target", "");
      cfg.attacker_reward = a.value("attacker_reward", "");
    }
    cfg.episodes = j.value("episodes", cfg.episodes);
    if (j.contains("seeds")) {
      cfg.seeds = j["seeds"].get<std::vector<unsigned>>();
    }
    cfg.eval_stride = j.value("eval_stride", cfg.eval_stride);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.track_hindsight_regret =
        j.value("hindsight_regret", cfg.track_hindsight_regret);
    if (j.contains("agents")) {
      const json& a = j["agents"];
      cfg.beta_c = a.value("beta_c", cfg.beta_c);
      cfg.agent_delta = a.value("delta", cfg.agent_delta);
    }
  } catch (const json::exception& e) {
    throw ConfigError(name + ": " + e.what());
  }

  if (cfg.fixture.empty() == cfg.spec_path.empty()) {
    throw ConfigError(name + ": exactly one of fixture/spec_path is required");
  }
  if (cfg.episodes < 1) throw ConfigError(name + ": episodes must be >= 1");
  if (cfg.seeds.empty()) throw ConfigError(name + ": seeds must be nonempty");
  if (cfg.eval_stride < 1) throw ConfigError(name + ": eval_stride must be >= 1");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str(), path);
}

}  // namespace mga
