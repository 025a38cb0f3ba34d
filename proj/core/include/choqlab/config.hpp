#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace choqlab {

// Declarative description of one experiment. Parsing is strict: unknown keys
// are rejected, every error is reported (not just the first), defaults are
// filled in, and the seed fully determines any stochastic path.
struct ExperimentConfig {
  std::string command;  // constants | bubble-check | cherrier | eigen |
                        // minimize | asymptotics | quotient
  std::map<std::string, std::string> params;
  std::string output_path;
  std::uint64_t seed = 1;

  int get_int(const std::string& key) const;
  double get_real(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;
  bool has(const std::string& key) const { return params.count(key) > 0; }
};

struct ParseOutcome {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;
};

// Flat key=value text (sections [name] flatten to name.key); '#' comments.
ParseOutcome parse_config(const std::string& text);

const std::vector<std::string>& known_commands();

}  // namespace choqlab
