#pragma once

#include <string>
#include <vector>

#include "choqlab/config.hpp"

namespace choqlab {

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> outputs;  // files written (atomically)
  std::string message;               // human-readable summary or error
};

// Dispatches a validated config to the lab modules and writes the report
// files. Identical config + seed produces byte-identical output.
RunResult run(const ExperimentConfig& config);

}  // namespace choqlab
