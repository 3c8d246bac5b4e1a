// Acceptance harness: runs the named suites (default: all) and prints one
// pass/fail line per criterion. Exits nonzero if anything fails.

#include <cstdio>
#include <string>
#include <vector>

#include "mga/acceptance.hpp"
#include "mga/errors.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> suites;
  std::string scratch = "acceptance_scratch";
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--scratch" && i + 1 < argc) {
      scratch = argv[++i];
    } else {
      suites.push_back(arg);
    }
  }
  if (suites.empty()) suites.push_back("all");

  bool all_pass = true;
  for (const std::string& suite : suites) {
    std::vector<mga::CriterionResult> results;
    try {
      results = mga::run_acceptance_suite(suite, scratch);
    } catch (const mga::Error& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 2;
    }
    for (const auto& r : results) {
      std::printf("[%s] criterion %s (%s): %s\n", r.pass ? "PASS" : "FAIL",
                  r.id.c_str(), r.suite.c_str(), r.detail.c_str());
      std::fflush(stdout);
      all_pass = all_pass && r.pass;
    }
  }
  return all_pass ? 0 : 1;
}
