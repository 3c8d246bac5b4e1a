#include "mga/spec_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mga/errors.hpp"

namespace mga {
namespace {

// Tokenizer that strips '#' comments and treats ':' as whitespace.
std::vector<std::vector<std::string>> tokenize(std::istream& in) {
  std::vector<std::vector<std::string>> lines;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& c : line) {
      if (c == ':') c = ' ';
    }
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string t;
    while (ls >> t) toks.push_back(t);
    if (!toks.empty()) lines.push_back(std::move(toks));
  }
  return lines;
}

int to_int(const std::string& t, const std::string& ctx) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(t, &pos);
    if (pos != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw IoError("expected integer, got '" + t + "' in " + ctx);
  }
}

double to_double(const std::string& t, const std::string& ctx) {
  try {
    std::size_t pos = 0;
    double v = std::stod(t, &pos);
    if (pos != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw IoError("expected number, got '" + t + "' in " + ctx);
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

void write_number(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

}  // namespace

MarkovGameSpec read_spec(std::istream& in, const std::string& name) {
  MarkovGameSpec spec;
  bool have_dims = false;
  std::vector<char> seen_p, seen_r;
  auto lines = tokenize(in);

  // First pass for dimensions so tensor rows can be placed directly.
  for (const auto& toks : lines) {
    const std::string& key = toks[0];
    if (key == "agents") spec.num_agents = to_int(toks.at(1), name);
    if (key == "states") spec.num_states = to_int(toks.at(1), name);
    if (key == "horizon") spec.horizon = to_int(toks.at(1), name);
    if (key == "actions") {
      spec.actions_per_agent.clear();
      for (std::size_t i = 1; i < toks.size(); ++i) {
        spec.actions_per_agent.push_back(to_int(toks[i], name));
      }
    }
  }
  if (spec.num_agents < 1 || spec.num_states < 1 || spec.horizon < 1 ||
      static_cast<int>(spec.actions_per_agent.size()) != spec.num_agents) {
    throw IoError(name + ": missing or inconsistent dimensions");
  }
  const int S = spec.num_states;
  const int A = spec.num_joint_actions();
  const int H = spec.horizon;
  const int m = spec.num_agents;
  spec.initial_dist.assign(S, 0.0);
  spec.transitions.assign(static_cast<std::size_t>(std::max(H - 1, 0)) * S *
                              A * S,
                          0.0);
  spec.mean_rewards.assign(static_cast<std::size_t>(m) * H * S * A, 0.0);
  seen_p.assign(static_cast<std::size_t>(std::max(H - 1, 0)) * S * A, 0);
  seen_r.assign(static_cast<std::size_t>(m) * H * S, 0);
  bool have_p0 = false;
  have_dims = true;
  (void)have_dims;

  for (const auto& toks : lines) {
    const std::string& key = toks[0];
    if (key == "agents" || key == "states" || key == "horizon" ||
        key == "actions") {
      continue;
    }
    if (key == "noise") {
      const std::string& kind = toks.at(1);
      if (kind == "bernoulli") {
        spec.noise = NoiseModel::bernoulli();
      } else if (kind == "gaussian") {
        spec.noise = NoiseModel::clamped_gaussian(to_double(toks.at(2), name));
      } else {
        throw IoError(name + ": unknown noise kind '" + kind + "'");
      }
    } else if (key == "p0") {
      if (static_cast<int>(toks.size()) != S + 1) {
        throw IoError(name + ": p0 needs " + std::to_string(S) + " entries");
      }
      for (int s = 0; s < S; ++s) spec.initial_dist[s] = to_double(toks[s + 1], name);
      have_p0 = true;
    } else if (key == "transition") {
      if (static_cast<int>(toks.size()) != 4 + S) {
        throw IoError(name + ": transition row needs h s a and " +
                      std::to_string(S) + " probabilities");
      }
      int h = to_int(toks[1], name), s = to_int(toks[2], name),
          a = to_int(toks[3], name);
      if (h < 0 || h >= H - 1 || s < 0 || s >= S || a < 0 || a >= A) {
        throw IoError(name + ": transition index out of range");
      }
      std::size_t row = (static_cast<std::size_t>(h) * S + s) * A + a;
      if (seen_p[row]) throw IoError(name + ": duplicate transition row");
      seen_p[row] = 1;
      for (int sp = 0; sp < S; ++sp) {
        spec.transitions[row * S + sp] = to_double(toks[4 + sp], name);
      }
    } else if (key == "reward") {
      if (static_cast<int>(toks.size()) != 4 + A) {
        throw IoError(name + ": reward row needs i h s and " +
                      std::to_string(A) + " values");
      }
      int i = to_int(toks[1], name), h = to_int(toks[2], name),
          s = to_int(toks[3], name);
      if (i < 0 || i >= m || h < 0 || h >= H || s < 0 || s >= S) {
        throw IoError(name + ": reward index out of range");
      }
      std::size_t row = (static_cast<std::size_t>(i) * H + h) * S + s;
      if (seen_r[row]) throw IoError(name + ": duplicate reward row");
      seen_r[row] = 1;
      for (int a = 0; a < A; ++a) {
        spec.mean_rewards[row * A + a] = to_double(toks[4 + a], name);
      }
    } else {
      throw IoError(name + ": unknown key '" + key + "'");
    }
  }

  if (!have_p0) throw IoError(name + ": missing p0");
  for (char c : seen_p) {
    if (!c) throw IoError(name + ": missing transition rows");
  }
  for (char c : seen_r) {
    if (!c) throw IoError(name + ": missing reward rows");
  }
  return spec;
}

MarkovGameSpec load_spec(const std::string& path) {
  auto in = open_input(path);
  return read_spec(in, path);
}

void write_spec(const MarkovGameSpec& spec, std::ostream& out) {
  const int S = spec.num_states;
  const int A = spec.num_joint_actions();
  out << "# Markov game spec (0-based indices; joint actions row-major,"
         " agent 0 most significant)\n";
  out << "agents " << spec.num_agents << "\n";
  out << "states " << S << "\n";
  out << "horizon " << spec.horizon << "\n";
  out << "actions";
  for (int a : spec.actions_per_agent) out << ' ' << a;
  out << "\n";
  if (spec.noise.kind == NoiseModel::Kind::kBernoulli) {
    out << "noise bernoulli\n";
  } else {
    out << "noise gaussian ";
    write_number(out, spec.noise.sigma);
    out << "\n";
  }
  out << "p0";
  for (double p : spec.initial_dist) {
    out << ' ';
    write_number(out, p);
  }
  out << "\n";
  for (int h = 0; h + 1 < spec.horizon; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        out << "transition " << h << ' ' << s << ' ' << a << " :";
        for (double p : spec.transition_row(h, s, a)) {
          out << ' ';
          write_number(out, p);
        }
        out << "\n";
      }
    }
  }
  for (int i = 0; i < spec.num_agents; ++i) {
    for (int h = 0; h < spec.horizon; ++h) {
      for (int s = 0; s < S; ++s) {
        out << "reward " << i << ' ' << h << ' ' << s << " :";
        for (int a = 0; a < A; ++a) {
          out << ' ';
          write_number(out, spec.reward(i, h, s, a));
        }
        out << "\n";
      }
    }
  }
}

void save_spec(const MarkovGameSpec& spec, const std::string& path) {
  auto out = open_output(path);
  write_spec(spec, out);
}

DeterministicJointPolicy load_policy(const std::string& path,
                                     const MarkovGameSpec& spec) {
  auto in = open_input(path);
  auto lines = tokenize(in);
  DeterministicJointPolicy pi;
  pi.horizon = spec.horizon;
  pi.num_states = spec.num_states;
  pi.joint.assign(static_cast<std::size_t>(spec.horizon) * spec.num_states,
                  -1);
  for (const auto& toks : lines) {
    const std::string& key = toks[0];
    if (key == "horizon") {
      if (to_int(toks.at(1), path) != spec.horizon) {
        throw IoError(path + ": horizon mismatch");
      }
    } else if (key == "states") {
      if (to_int(toks.at(1), path) != spec.num_states) {
        throw IoError(path + ": states mismatch");
      }
    } else if (key == "action") {
      if (static_cast<int>(toks.size()) != 3 + spec.num_agents) {
        throw IoError(path + ": action row needs h s and " +
                      std::to_string(spec.num_agents) + " own actions");
      }
      int h = to_int(toks[1], path), s = to_int(toks[2], path);
      if (h < 0 || h >= spec.horizon || s < 0 || s >= spec.num_states) {
        throw IoError(path + ": action index out of range");
      }
      std::vector<int> own(spec.num_agents);
      for (int i = 0; i < spec.num_agents; ++i) {
        own[i] = to_int(toks[3 + i], path);
        if (own[i] < 0 || own[i] >= spec.actions_per_agent[i]) {
          throw IoError(path + ": own action out of range");
        }
      }
      pi.at(h, s) = spec.encode_joint(own);
    } else {
      throw IoError(path + ": unknown key '" + key + "'");
    }
  }
  for (int v : pi.joint) {
    if (v < 0) throw IoError(path + ": missing action rows");
  }
  return pi;
}

void save_policy(const DeterministicJointPolicy& pi,
                 const MarkovGameSpec& spec, const std::string& path) {
  auto out = open_output(path);
  out << "# deterministic joint policy: action h s : per-agent own actions\n";
  out << "horizon " << pi.horizon << "\n";
  out << "states " << pi.num_states << "\n";
  for (int h = 0; h < pi.horizon; ++h) {
    for (int s = 0; s < pi.num_states; ++s) {
      out << "action " << h << ' ' << s << " :";
      for (int i = 0; i < spec.num_agents; ++i) {
        out << ' ' << spec.agent_action(pi.at(h, s), i);
      }
      out << "\n";
    }
  }
}

std::vector<double> load_reward_tensor(const std::string& path,
                                       const MarkovGameSpec& spec) {
  auto in = open_input(path);
  auto lines = tokenize(in);
  const int S = spec.num_states;
  const int A = spec.num_joint_actions();
  std::vector<double> tensor(static_cast<std::size_t>(spec.horizon) * S * A,
                             -1.0);
  for (const auto& toks : lines) {
    const std::string& key = toks[0];
    if (key == "horizon") {
      if (to_int(toks.at(1), path) != spec.horizon) {
        throw IoError(path + ": horizon mismatch");
      }
    } else if (key == "states") {
      if (to_int(toks.at(1), path) != S) {
        throw IoError(path + ": states mismatch");
      }
    } else if (key == "row") {
      if (static_cast<int>(toks.size()) != 3 + A) {
        throw IoError(path + ": row needs h s and " + std::to_string(A) +
                      " values");
      }
      int h = to_int(toks[1], path), s = to_int(toks[2], path);
      if (h < 0 || h >= spec.horizon || s < 0 || s >= S) {
        throw IoError(path + ": row index out of range");
      }
      for (int a = 0; a < A; ++a) {
        tensor[(static_cast<std::size_t>(h) * S + s) * A + a] =
            to_double(toks[3 + a], path);
      }
    } else {
      throw IoError(path + ": unknown key '" + key + "'");
    }
  }
  for (double v : tensor) {
    if (!(v > 0.0 && v <= 1.0)) {
      throw IoError(path + ": attacker rewards must lie in (0,1]");
    }
  }
  return tensor;
}

void save_reward_tensor(const std::vector<double>& tensor,
                        const MarkovGameSpec& spec, const std::string& path) {
  const int S = spec.num_states;
  const int A = spec.num_joint_actions();
  if (tensor.size() != static_cast<std::size_t>(spec.horizon) * S * A) {
    throw SpecError("reward tensor size mismatch");
  }
  auto out = open_output(path);
  out << "# attacker reward tensor: row h s : per-joint-action values\n";
  out << "horizon " << spec.horizon << "\n";
  out << "states " << S << "\n";
  for (int h = 0; h < spec.horizon; ++h) {
    for (int s = 0; s < S; ++s) {
      out << "row " << h << ' ' << s << " :";
      for (int a = 0; a < A; ++a) {
        out << ' ';
        write_number(out, tensor[(static_cast<std::size_t>(h) * S + s) * A + a]);
      }
      out << "\n";
    }
  }
}

}  // namespace mga
