#pragma once

#include <string>
#include <vector>

namespace mga {

struct CriterionResult {
  std::string id;      // "1".."8"
  std::string suite;   // suite name the criterion belongs to
  bool pass = false;
  std::string detail;  // measured numbers vs thresholds
};

// Named acceptance suites:
//   dp-oracle, post-attack-equilibrium, sublinearity-mixed,
//   sublinearity-whitebox, limitations, exploration-gap, ftrl-regret,
//   approx-mixed-e2e, metrics-identities, all.
// scratch_dir is used by the suites that exercise file emission.
std::vector<CriterionResult> run_acceptance_suite(
    const std::string& suite, const std::string& scratch_dir);

std::vector<std::string> acceptance_suite_names();

}  // namespace mga
