#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "vortex/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"vortex: continuation solver for vortex and Higgs equations"};
  app.require_subcommand(1);
  vortex::CommandOptions opts;
  std::string config, out;
  std::uint64_t seed = 0;
  int grid = 0;
  double eps_min = 0.0;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", config, "config file (key = value lines)");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides VORTEX_OUT_DIR)");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--grid", grid, "grid size")->check(CLI::PositiveNumber);
    sub->add_option("--eps-min", eps_min, "smallest continuation epsilon")->check(CLI::PositiveNumber);
    sub->add_flag("--quick", opts.quick, "reduced grids and probe counts");
  };
  CLI::App* solve = app.add_subcommand("solve", "run the continuation for one instance");
  CLI::App* sweep = app.add_subcommand("sweep-tau", "bisect the solvability threshold in tau");
  CLI::App* stability = app.add_subcommand("stability", "slope analysis of the configured bundle");
  CLI::App* verify = app.add_subcommand("verify", "property checks");
  CLI::App* report = app.add_subcommand("report", "re-render plots and summary from an output directory");
  add_common(solve, true);
  add_common(sweep, true);
  add_common(stability, true);
  add_common(verify, false);
  add_common(report, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--config")) opts.config_path = config;
  if (sub->count("--out")) opts.out = out;
  if (sub->count("--seed")) opts.seed = seed;
  if (sub->count("--grid")) opts.grid = grid;
  if (sub->count("--eps-min")) opts.eps_min = eps_min;

  if (sub == solve) return vortex::cmd_solve(opts, std::cout, std::cerr);
  if (sub == sweep) return vortex::cmd_sweep_tau(opts, std::cout, std::cerr);
  if (sub == stability) return vortex::cmd_stability(opts, std::cout, std::cerr);
  if (sub == verify) return vortex::cmd_verify(opts, std::cout, std::cerr);
  return vortex::cmd_report(opts, std::cout, std::cerr);
}
