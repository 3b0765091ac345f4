#pragma once

#include <string>
#include <vector>

namespace srw::verify {

struct Check {
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;  // measured margins against their budgets
};

// Full verification suite: every headline law and reproducibility contract
// the library promises, one named check each. All tolerances live here, not
// in the callers. Runs in well under a minute on a single core.
std::vector<Check> runAll();

}  // namespace srw::verify
