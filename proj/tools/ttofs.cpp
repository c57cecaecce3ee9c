#include "ttofs/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Finite sections of truncated Toeplitz operators on model spaces"};
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("config", config, "Config file")->required();
  auto* validate = app.add_subcommand("validate", "Check a config against the schema");
  validate->add_option("config", config, "Config file")->required();
  app.add_subcommand("list-families", "Print zero families, symbol forms and example configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ttofs::cli::kExitConfig;
  }

  if (*run) return ttofs::cli::command_run(config, std::cout, std::cerr);
  if (*validate) return ttofs::cli::command_validate(config, std::cout, std::cerr);
  return ttofs::cli::command_list_families(std::cout);
}
