#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mga/types.hpp"

namespace mga {

// Key/value text format for Markov game specs. Lines (order free, '#'
// comments, ':' separators optional):
//   agents M
//   states S
//   horizon H
//   actions A_1 ... A_M
//   noise bernoulli | noise gaussian SIGMA
//   p0 p(0) ... p(S-1)
//   transition h s a : p(s'=0) ... p(s'=S-1)     for h in [0, H-2]
//   reward i h s : r(a=0) ... r(a=A-1)           joint actions row-major,
//                                                agent 0 most significant
// Every transition and reward row must be present exactly once. Indices are
// 0-based.
MarkovGameSpec load_spec(const std::string& path);
MarkovGameSpec read_spec(std::istream& in, const std::string& name);
void save_spec(const MarkovGameSpec& spec, const std::string& path);
void write_spec(const MarkovGameSpec& spec, std::ostream& out);

// Deterministic joint policy file:
//   horizon H
//   states S
//   action h s : a_1 ... a_M      per-agent own actions
DeterministicJointPolicy load_policy(const std::string& path,
                                     const MarkovGameSpec& spec);
void save_policy(const DeterministicJointPolicy& pi,
                 const MarkovGameSpec& spec, const std::string& path);

// Attacker reward tensor file (H*S*A values in (0,1]):
//   horizon H
//   states S
//   row h s : v(a=0) ... v(a=A-1)
std::vector<double> load_reward_tensor(const std::string& path,
                                       const MarkovGameSpec& spec);
void save_reward_tensor(const std::vector<double>& tensor,
                        const MarkovGameSpec& spec, const std::string& path);

}  // namespace mga
