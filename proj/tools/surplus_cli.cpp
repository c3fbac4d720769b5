#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "surplus/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Capital requirements and acceptance-set checks on finite scenario spaces"};
  app.require_subcommand(1);
  surplus::cli::Config config;
  std::uint64_t seed = 0;

  for (const char* name : surplus::cli::kCommands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--space", config.space, "scenario space JSON")->required();
    sub->add_option("--acceptance", config.acceptance, "acceptance set JSON");
    sub->add_option("--asset", config.asset, "eligible asset JSON (default: cash)");
    sub->add_option("--positions", config.positions, "positions JSON");
    sub->add_option("--measure", config.measure, "positive risk measure JSON");
    sub->add_option("--duals", config.duals, "dual densities JSON");
    sub->add_option("--properties", config.properties, "comma-separated property or axiom names")->delimiter(',');
    sub->add_option("--tol", config.tol, "bisection tolerance in (0, 1e-3]");
    sub->add_option("--cap", config.cap, "probe cap for infinite requirements");
    sub->add_option("--budget", config.budget, "sample budget per check");
    sub->add_option("--seed", seed, "seed for sampled checks");
    sub->add_option("--format", config.format, "json, csv or text");
    sub->add_option("--jobs", config.jobs, "worker threads for per-position evaluation");
    sub->add_flag("--verify", config.verify, "verify the dual representation (dual)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen->count("--seed") > 0) config.seed = seed;
  const surplus::cli::Outcome out = surplus::cli::run(chosen->get_name(), config);
  if (out.exit_code == 2) {
    std::cerr << "error: " << out.error << '\n';
    return 2;
  }
  std::cout << surplus::cli::render(out.report, config.format);
  return out.exit_code;
}
