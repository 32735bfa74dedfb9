// Command-line front end: stabman <check|policy|simulate|ep> --config FILE

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "stabman/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = stabman::cli;
  CLI::App app{"Approximate stable manifolds: condition checks, policy graphs, simulation and extended path"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<int> order;
  std::optional<std::string> out_dir;
  std::optional<int> grid;
  std::optional<unsigned long long> seed;
  app.add_option("--config", config_path, "INI run configuration")->required();
  app.add_option("--order", order, "order i of the policy approximation h_i");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--grid", grid, "number of policy grid points");
  app.add_option("--seed", seed, "seed for the stochastic shock sequence");

  auto* check = app.add_subcommand("check", "write Conditions 1-3 and the bounds to report.txt");
  auto* policy = app.add_subcommand("policy", "write the policy graph to policy.csv");
  auto* simulate = app.add_subcommand("simulate", "write an equilibrium path to simulate.csv");
  auto* ep = app.add_subcommand("ep", "write extended-path sweeps to ep.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(cli::kConfig);
  }

  try {
    cli::RunConfig cfg = cli::load_config(config_path);
    if (order) cfg.order = *order;
    if (out_dir) cfg.output_dir = *out_dir;
    if (grid) cfg.grid = *grid;
    if (seed) cfg.seed = *seed;
    cli::validate(cfg);
    std::filesystem::create_directories(cfg.output_dir);

    std::filesystem::path written;
    if (check->parsed()) written = cli::cmd_check(cfg);
    if (policy->parsed()) written = cli::cmd_policy(cfg);
    if (simulate->parsed()) written = cli::cmd_simulate(cfg);
    if (ep->parsed()) written = cli::cmd_ep(cfg);
    std::cout << written.string() << '\n';
    return cli::kOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_code(e);
  }
}
