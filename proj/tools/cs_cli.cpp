#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cs/errors.hpp"
#include "run_config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Chern-Simons experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  cs::Overrides ov;
  auto* run = app.add_subcommand("run", "run the experiments of a TOML config");
  run->add_option("--config", config_path, "config file")->required();
  run->add_option("--seed", ov.seed, "override the run seed");
  run->add_option("--out", out_dir, "directory for report.json and CSV files");
  run->add_option("--quadrature-order", ov.quadrature_order, "Gauss-Legendre nodes per axis");
  run->add_option("--fd-step", ov.fd_step, "finite-difference step");
  run->add_option("--tol", ov.tol, "tolerance for every experiment");

  app.add_subcommand("list-builtins", "print the built-in charts, cycles, groups and experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (app.got_subcommand("list-builtins")) {
    cs::print_catalog(std::cout);
    return 0;
  }

  try {
    const auto config = cs::load_config(config_path, ov);
    return cs::run_and_report(config, out_dir, std::cout);
  } catch (const cs::Error& e) {
    std::cerr << e.what() << '\n';
    return e.kind() == cs::ErrorKind::ConfigInvalid ? 2 : 1;
  }
}
