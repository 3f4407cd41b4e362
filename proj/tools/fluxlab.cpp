#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "fluxlab/constants.hpp"
#include "fluxlab/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fluxlab: charge-fluxon scenarios"};
  app.set_version_flag("--version", std::string(fluxlab::kVersion));
  app.require_subcommand(1);

  std::string run_path;
  auto* run = app.add_subcommand("run", "validate and run a scenario config, writing its report");
  run->add_option("config", run_path, "scenario JSON")->required();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a scenario config and print its normalized form");
  validate->add_option("config", validate_path, "scenario JSON")->required();

  std::string table = "codata";
  auto* constants = app.add_subcommand("constants", "print the pinned constants table as JSON");
  constants->add_option("--set", table, "codata or unit")->check(CLI::IsMember({"codata", "unit"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fluxlab::kExitValidation;
  }

  if (*run) return fluxlab::run_config_file(run_path, std::cout, std::cerr);
  if (*validate) return fluxlab::validate_config_file(validate_path, std::cout, std::cerr);
  const auto& k = table == "unit" ? fluxlab::unit_constants() : fluxlab::codata();
  std::cout << fluxlab::constants_json(k).dump(2) << '\n';
  return fluxlab::kExitOk;
}
