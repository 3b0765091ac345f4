// Runs the full verification suite and reports one line per check.
// Exit status is the number of failing checks.

#include <cstdio>

#include "srw/verify.hpp"

int main() {
  const auto checks = srw::verify::runAll();
  int failures = 0;
  for (const auto& c : checks) {
    std::printf("[%s] %-22s %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.detail.c_str());
    std::fflush(stdout);
    if (!c.pass) ++failures;
  }
  std::printf("%zu checks, %d failing\n", checks.size(), failures);
  return failures;
}
