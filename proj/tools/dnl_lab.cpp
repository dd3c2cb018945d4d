// dnl_lab <command> <config>...
//
// Several configs run concurrently; each writes into its own output.path.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dnl/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Doubly nonlinear diffusion lab"};
  app.require_subcommand(1);

  std::vector<std::string> configs;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"profile", "Barenblatt profiles and weights on the grid (profile.csv)"},
      {"simulate", "Run the rescaled flow (series.csv, snapshots.csv, run.json)"},
      {"spectrum", "Hardy-Poincare constant per eps with refinement (spectrum.json)"},
      {"rates", "Fit decay rates on a stored run (rates.json)"},
      {"verify", "Decay theorem and inequality chain on a stored run (verify.json)"},
      {"check", "Inequality suite on every stored snapshot (check.json)"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("configs", configs, "Config files")->required()->check(CLI::ExistingFile);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::vector<std::filesystem::path> files(configs.begin(), configs.end());
  return dnl::run_command(app.get_subcommands().front()->get_name(), files, std::cout, std::cerr);
}
