#pragma once

#include <string>
#include <vector>

namespace thinfilm {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

std::vector<CriterionResult> run_acceptance();

// prints one pass/fail line per criterion, returns the number of failures
int acceptance_main();

}  // namespace thinfilm
