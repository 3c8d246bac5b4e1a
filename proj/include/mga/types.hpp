#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mga/errors.hpp"
#include "mga/rng.hpp"

namespace mga {

// Reward noise attached to a game. Bernoulli keeps realized rewards in {0,1}
// with the exact mean; the clamped Gaussian is provided for experiment parity
// and slightly biases means near the [0,1] boundary.
struct NoiseModel {
  enum class Kind { kBernoulli, kClampedGaussian };
  Kind kind = Kind::kBernoulli;
  double sigma = 0.0;

  static NoiseModel bernoulli() { return {Kind::kBernoulli, 0.0}; }
  static NoiseModel clamped_gaussian(double sigma) {
    return {Kind::kClampedGaussian, sigma};
  }
};

inline double draw_reward(double mean, const NoiseModel& noise, Rng& rng) {
  if (noise.kind == NoiseModel::Kind::kBernoulli) {
    return bernoulli(mean, rng) ? 1.0 : 0.0;
  }
  double r = std::normal_distribution<double>(mean, noise.sigma)(rng);
  return std::min(1.0, std::max(0.0, r));
}

// Deterministic joint policy: one joint-action index per (step, state).
// Joint actions are flattened row-major over agent indices (agent 0 is the
// most significant digit), so fixtures and tie-breaks are unambiguous.
struct DeterministicJointPolicy {
  int horizon = 0;
  int num_states = 0;
  std::vector<int> joint;  // size horizon * num_states

  int at(int h, int s) const { return joint[h * num_states + s]; }
  int& at(int h, int s) { return joint[h * num_states + s]; }

  bool operator==(const DeterministicJointPolicy& o) const = default;
};

// Tabular episodic Markov game. Steps and states are 0-based throughout.
//
// Storage layout:
//   transitions: (horizon-1) x S x A x S, row ((h*S+s)*A+a) is P_h(.|s,a).
//                The step-h tensor governs the move into step h+1; there is
//                no tensor for the final step.
//   mean_rewards: m x H x S x A, entry ((i*H+h)*S+s)*A+a is R_{i,h}(s,a).
struct MarkovGameSpec {
  int num_agents = 0;
  int num_states = 0;
  int horizon = 0;
  std::vector<int> actions_per_agent;
  std::vector<double> initial_dist;   // size S
  std::vector<double> transitions;    // size (H-1)*S*A*S
  std::vector<double> mean_rewards;   // size m*H*S*A
  NoiseModel noise;

  int num_joint_actions() const {
    int a = 1;
    for (int ai : actions_per_agent) a *= ai;
    return a;
  }

  // Stride of agent i in the joint-action index (product of later agents'
  // action counts).
  int agent_stride(int i) const {
    int s = 1;
    for (int j = i + 1; j < num_agents; ++j) s *= actions_per_agent[j];
    return s;
  }

  int agent_action(int joint, int i) const {
    return (joint / agent_stride(i)) % actions_per_agent[i];
  }

  int encode_joint(std::span<const int> own) const {
    int joint = 0;
    for (int i = 0; i < num_agents; ++i) {
      joint = joint * actions_per_agent[i] + own[i];
    }
    return joint;
  }

  // Joint action equal to `joint` except agent i plays `action`.
  int replace_agent_action(int joint, int i, int action) const {
    int stride = agent_stride(i);
    int old = (joint / stride) % actions_per_agent[i];
    return joint + (action - old) * stride;
  }

  double reward(int i, int h, int s, int a) const {
    return mean_rewards[((static_cast<std::size_t>(i) * horizon + h) *
                             num_states +
                         s) *
                            num_joint_actions() +
                        a];
  }

  std::span<const double> transition_row(int h, int s, int a) const {
    std::size_t off = ((static_cast<std::size_t>(h) * num_states + s) *
                           num_joint_actions() +
                       a) *
                      num_states;
    return {transitions.data() + off, static_cast<std::size_t>(num_states)};
  }
};

struct ValidationReport {
  bool ok = true;
  std::string message;
};

// Checks the MarkovGameSpec invariants: shapes, stochastic rows (1e-12),
// rewards in [0,1], positive dimensions. Reports the first violation found.
ValidationReport validate_spec(const MarkovGameSpec& spec);

inline void require_valid(const MarkovGameSpec& spec) {
  ValidationReport rep = validate_spec(spec);
  if (!rep.ok) throw SpecError(rep.message);
}

// Per-agent product policy; each agent i holds a distribution over its own
// A_i actions at every (step, state). Agents may have different action
// counts, hence the per-agent offsets into one flat array.
struct ProductPolicy {
  int num_agents = 0;
  int horizon = 0;
  int num_states = 0;
  std::vector<int> actions_per_agent;
  std::vector<int> offsets;       // prefix sums of actions_per_agent
  std::vector<double> probs;      // size H * S * sum(A_i)

  static ProductPolicy uniform(const MarkovGameSpec& spec);

  double get(int i, int h, int s, int ai) const {
    return probs[index(i, h, s, ai)];
  }
  void set(int i, int h, int s, int ai, double p) {
    probs[index(i, h, s, ai)] = p;
  }
  std::span<const double> dist(int i, int h, int s) const {
    return {probs.data() + index(i, h, s, 0),
            static_cast<std::size_t>(actions_per_agent[i])};
  }
  std::span<double> dist(int i, int h, int s) {
    return {probs.data() + index(i, h, s, 0),
            static_cast<std::size_t>(actions_per_agent[i])};
  }

  // Probability of joint action a at (h, s) under the product.
  double joint_prob(const MarkovGameSpec& spec, int h, int s, int a) const {
    double p = 1.0;
    for (int i = 0; i < num_agents; ++i) {
      p *= get(i, h, s, spec.agent_action(a, i));
    }
    return p;
  }

  std::size_t index(int i, int h, int s, int ai) const {
    std::size_t width = offsets.back();
    return (static_cast<std::size_t>(h) * num_states + s) * width +
           offsets[i] + ai;
  }
};

// Turns a deterministic joint policy into the equivalent product policy.
ProductPolicy to_product(const MarkovGameSpec& spec,
                         const DeterministicJointPolicy& pi);

// Checks the ProductPolicy invariants against a spec (shape, distributions
// sum to 1 within 1e-12, entries nonnegative).
ValidationReport validate_policy(const MarkovGameSpec& spec,
                                 const ProductPolicy& pi);

// Exact value and Q tables for one evaluated policy.
//   v: m x H x S,   q: m x H x S x A
struct ValueTables {
  int num_agents = 0;
  int horizon = 0;
  int num_states = 0;
  int num_joint_actions = 0;
  std::vector<double> v;
  std::vector<double> q;

  double value(int i, int h, int s) const {
    return v[(static_cast<std::size_t>(i) * horizon + h) * num_states + s];
  }
  double& value(int i, int h, int s) {
    return v[(static_cast<std::size_t>(i) * horizon + h) * num_states + s];
  }
  double qvalue(int i, int h, int s, int a) const {
    return q[((static_cast<std::size_t>(i) * horizon + h) * num_states + s) *
                 num_joint_actions +
             a];
  }
  double& qvalue(int i, int h, int s, int a) {
    return q[((static_cast<std::size_t>(i) * horizon + h) * num_states + s) *
                 num_joint_actions +
             a];
  }
};

}  // namespace mga
