// choqlab command line: runs one declarative experiment per invocation.
//
//   choqlab <command> --config <path> [--out <path>] [--seed <int>]
//
// Commands: constants, bubble-check, cherrier, eigen, minimize, asymptotics,
// quotient. The config file is a flat key=value document; --out and --seed
// override the file. Reports are CSV, written atomically; a fixed seed makes
// repeated runs byte-identical.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "choqlab/csv.hpp"
#include "choqlab/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"choqlab - numerical laboratory for critical Choquard-Neumann problems"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  long long seed = -1;

  for (const std::string& name : choqlab::known_commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--out", out_path, "output CSV path");
    sub->add_option("--seed", seed, "seed for stochastic paths");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  std::string text;
  try {
    text = choqlab::read_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  choqlab::ParseOutcome parsed = choqlab::parse_config(text);
  if (!parsed.errors.empty()) {
    for (const auto& err : parsed.errors) std::cerr << "config error: " << err << "\n";
    return 2;
  }
  choqlab::ExperimentConfig cfg = *parsed.config;
  if (cfg.command != command) {
    std::cerr << "config error: file declares command '" << cfg.command
              << "' but '" << command << "' was requested\n";
    return 2;
  }
  if (!out_path.empty()) cfg.output_path = out_path;
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);

  const choqlab::RunResult res = choqlab::run(cfg);
  if (res.exit_code == 0) {
    for (const auto& f : res.outputs) std::cout << "wrote " << f << "\n";
    std::cout << res.message << "\n";
  } else {
    std::cerr << "error: " << res.message << "\n";
  }
  return res.exit_code;
}
