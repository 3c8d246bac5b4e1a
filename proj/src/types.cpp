#include "mga/types.hpp"

#include <cmath>
#include <cstdio>

namespace mga {
namespace {

constexpr double kRowTol = 1e-12;

std::string location(const char* what, int h, int s, int a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%s at (h=%d, s=%d, a=%d)", what, h, s, a);
  return buf;
}

}  // namespace

ValidationReport validate_spec(const MarkovGameSpec& spec) {
  auto fail = [](std::string msg) { return ValidationReport{false, std::move(msg)}; };

  if (spec.num_agents < 1) return fail("num_agents must be >= 1");
  if (spec.num_states < 1) return fail("num_states must be >= 1");
  if (spec.horizon < 1) return fail("horizon must be >= 1");
  if (static_cast<int>(spec.actions_per_agent.size()) != spec.num_agents) {
    return fail("actions_per_agent size mismatch");
  }
  for (int i = 0; i < spec.num_agents; ++i) {
    if (spec.actions_per_agent[i] < 1) {
      return fail("agent " + std::to_string(i) + " has no actions");
    }
  }

  const int S = spec.num_states;
  const int A = spec.num_joint_actions();
  const int H = spec.horizon;
  const int m = spec.num_agents;

  if (static_cast<int>(spec.initial_dist.size()) != S) {
    return fail("initial_dist size mismatch");
  }
  double p0 = 0.0;
  for (int s = 0; s < S; ++s) {
    if (spec.initial_dist[s] < 0.0) return fail("initial_dist has a negative entry");
    p0 += spec.initial_dist[s];
  }
  if (std::abs(p0 - 1.0) > kRowTol) return fail("initial_dist does not sum to 1");

  std::size_t want_p = static_cast<std::size_t>(std::max(H - 1, 0)) * S * A * S;
  if (spec.transitions.size() != want_p) return fail("transitions size mismatch");
  for (int h = 0; h + 1 < H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        auto row = spec.transition_row(h, s, a);
        double sum = 0.0;
        for (double p : row) {
          if (p < 0.0) return fail(location("negative transition probability", h, s, a));
          sum += p;
        }
        if (std::abs(sum - 1.0) > kRowTol) {
          return fail(location("non-stochastic row", h, s, a));
        }
      }
    }
  }

  std::size_t want_r = static_cast<std::size_t>(m) * H * S * A;
  if (spec.mean_rewards.size() != want_r) return fail("mean_rewards size mismatch");
  for (int i = 0; i < m; ++i) {
    for (int h = 0; h < H; ++h) {
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
          double r = spec.reward(i, h, s, a);
          if (!(r >= 0.0 && r <= 1.0)) {
            return fail(location(("agent " + std::to_string(i) +
                                  " reward out of range")
                                     .c_str(),
                                 h, s, a));
          }
        }
      }
    }
  }
  if (spec.noise.kind == NoiseModel::Kind::kClampedGaussian &&
      spec.noise.sigma < 0.0) {
    return fail("negative noise sigma");
  }
  return {};
}

ProductPolicy ProductPolicy::uniform(const MarkovGameSpec& spec) {
  ProductPolicy pi;
  pi.num_agents = spec.num_agents;
  pi.horizon = spec.horizon;
  pi.num_states = spec.num_states;
  pi.actions_per_agent = spec.actions_per_agent;
  pi.offsets.resize(spec.num_agents + 1, 0);
  for (int i = 0; i < spec.num_agents; ++i) {
    pi.offsets[i + 1] = pi.offsets[i] + spec.actions_per_agent[i];
  }
  pi.probs.assign(static_cast<std::size_t>(spec.horizon) * spec.num_states *
                      pi.offsets.back(),
                  0.0);
  for (int h = 0; h < spec.horizon; ++h) {
    for (int s = 0; s < spec.num_states; ++s) {
      for (int i = 0; i < spec.num_agents; ++i) {
        double p = 1.0 / spec.actions_per_agent[i];
        for (int ai = 0; ai < spec.actions_per_agent[i]; ++ai) {
          pi.set(i, h, s, ai, p);
        }
      }
    }
  }
  return pi;
}

ProductPolicy to_product(const MarkovGameSpec& spec,
                         const DeterministicJointPolicy& pi) {
  ProductPolicy out = ProductPolicy::uniform(spec);
  std::fill(out.probs.begin(), out.probs.end(), 0.0);
  for (int h = 0; h < spec.horizon; ++h) {
    for (int s = 0; s < spec.num_states; ++s) {
      int joint = pi.at(h, s);
      for (int i = 0; i < spec.num_agents; ++i) {
        out.set(i, h, s, spec.agent_action(joint, i), 1.0);
      }
    }
  }
  return out;
}

ValidationReport validate_policy(const MarkovGameSpec& spec,
                                 const ProductPolicy& pi) {
  auto fail = [](std::string msg) { return ValidationReport{false, std::move(msg)}; };
  if (pi.num_agents != spec.num_agents || pi.horizon != spec.horizon ||
      pi.num_states != spec.num_states ||
      pi.actions_per_agent != spec.actions_per_agent) {
    return fail("policy shape mismatch");
  }
  for (int h = 0; h < spec.horizon; ++h) {
    for (int s = 0; s < spec.num_states; ++s) {
      for (int i = 0; i < spec.num_agents; ++i) {
        double sum = 0.0;
        for (int ai = 0; ai < spec.actions_per_agent[i]; ++ai) {
          double p = pi.get(i, h, s, ai);
          if (p < 0.0) return fail("policy has a negative probability");
          sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12) {
          return fail("policy distribution does not sum to 1");
        }
      }
    }
  }
  return {};
}

}  // namespace mga
