#pragma once

#include <string>
#include <vector>

namespace srw::cli {

// Entry point shared by the srw binary and the tests. `args` excludes the
// program name. Returns the process exit code; diagnostics go to the
// standard streams and artifacts to the configured output directory.
int run(const std::vector<std::string>& args);

int run(int argc, char** argv);

}  // namespace srw::cli
