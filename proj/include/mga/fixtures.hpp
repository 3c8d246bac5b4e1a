#pragma once

#include <string>
#include <vector>

#include "mga/types.hpp"

namespace mga {

// The 2x2 cooperate/defect matrix game (m=2, S=1, H=1). Both agents share
// rewards: (C,C)=1, (C,D)=(D,C)=0.5, (D,D)=0.1.
MarkovGameSpec table1_matrix_game(NoiseModel noise = NoiseModel::bernoulli());

// The 3-state, H=2, 2-agent cooperate/defect game used for the case-1 and
// case-2 targets. Per-state shared rewards: s0 as the matrix game with
// (D,D)=0.2, s1 with (D,D)=0.1, s2 with (D,D)=0.9. The episode starts at s0;
// (D,D) moves to s1 with probability 0.9 and to s2 with 0.1, every other
// joint action swaps the two.
MarkovGameSpec case_mg(NoiseModel noise = NoiseModel::bernoulli());

// Target for case 1: both agents defect everywhere. The condition checks
// fail for it; poisoning one channel alone cannot enforce it efficiently.
DeterministicJointPolicy case1_target();

// Target for case 2: cooperate at s0 and s1, defect at s2. Both condition
// checks hold for it.
DeterministicJointPolicy case2_target();

// Three recycling robots (m=3, S=8, H=6, two actions each). Each robot has a
// high/low battery level; state bit r set means robot r is low. All robots
// start at high energy.
//   high + conservative = wait, mean 0.4; stays high.
//   high + aggressive   = search, mean 0.2 + 0.9 shared equally among all
//                         searching robots (capped at 1); drops to low with
//                         probability 0.3 in daytime steps (h < 3) and 0.7
//                         at night (h >= 3).
//   low + conservative  = wait, mean 0.3; stays low.
//   low + aggressive    = return to swap battery, mean 0.2; back to high.
MarkovGameSpec recycling_robots(NoiseModel noise = NoiseModel::bernoulli());

// Attacker reward tensors for the recycling fixture (H*S*A, values in (0,1]).
// R1: the first robot's reward. Anti23: 1 - R2/2 - R3/2.
std::vector<double> recycling_reward_r1();
std::vector<double> recycling_reward_anti23();

// Attacker reward equal to agent i's reward tensor of an arbitrary spec.
std::vector<double> agent_reward_tensor(const MarkovGameSpec& spec, int agent);

// Fixture registry for the CLI: "table1", "case_mg", "recycling_robots".
MarkovGameSpec fixture_by_name(const std::string& name,
                               NoiseModel noise = NoiseModel::bernoulli());
std::vector<std::string> fixture_names();

}  // namespace mga
