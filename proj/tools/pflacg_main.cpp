#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>

#include "pflacg/bench.hpp"

using namespace pflacg;

int main(int argc, char** argv) {
  CLI::App app{
      "Projection-free constrained optimization: conditional-gradient "
      "variants coupled with a parameter-free locally accelerated method"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed_override;
  std::string mode = "lockstep";
  std::optional<long> budget_iters;
  std::optional<double> budget_seconds;
  app.add_option("--seed", seed_override, "override the problem seed");
  app.add_option("--mode", mode, "lockstep or parallel coupling")
      ->check(CLI::IsMember({"lockstep", "parallel"}));
  app.add_option("--budget-iters", budget_iters, "iteration budget per run");
  app.add_option("--budget-seconds", budget_seconds,
                 "wall-clock budget per run in seconds");

  auto* run = app.add_subcommand("run", "run algorithms from a config file");
  run->fallthrough();
  std::string config_path;
  run->add_option("--config", config_path, "key = value config file")
      ->required();

  auto* bench = app.add_subcommand(
      "bench", "run a family comparison and emit CSVs");
  bench->fallthrough();
  std::string family = "simplex";
  std::string scale = "desk";
  std::string out_dir = "bench-out";
  double bench_epsilon = 1e-8;
  bench->add_option("--family", family, "simplex, lasso, or birkhoff")
      ->check(CLI::IsMember({"simplex", "lasso", "birkhoff"}));
  bench->add_option("--scale", scale, "desk or full")
      ->check(CLI::IsMember({"desk", "full"}));
  bench->add_option("--out", out_dir, "output directory");
  bench->add_option("--epsilon", bench_epsilon, "target strong Wolfe gap");

  auto* compare = app.add_subcommand("compare", "compare finished trace CSVs");
  compare->fallthrough();
  std::vector<std::string> csv_paths;
  compare->add_option("csvs", csv_paths, "two or more trace CSV files")
      ->expected(-1);

  CLI11_PARSE(app, argc, argv);

  const CouplingMode coupling_mode =
      mode == "parallel" ? CouplingMode::parallel : CouplingMode::lockstep;

  if (*run) {
    std::ifstream is(config_path);
    if (!is) {
      std::cerr << "error: cannot open config file " << config_path << "\n";
      return 2;
    }
    RunConfig cfg;
    try {
      cfg = parse_run_config(is);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
    if (seed_override) cfg.problem.seed = *seed_override;
    cfg.mode = coupling_mode;
    if (budget_iters) cfg.budget.max_iterations = *budget_iters;
    if (budget_seconds) cfg.budget.max_seconds = *budget_seconds;
    return cmd_run(cfg, std::cout, std::cerr);
  }

  if (*bench) {
    BenchOptions opt;
    if (seed_override) opt.seed = *seed_override;
    opt.mode = coupling_mode;
    opt.epsilon = bench_epsilon;
    if (budget_iters) opt.budget.max_iterations = *budget_iters;
    if (budget_seconds) opt.budget.max_seconds = *budget_seconds;
    try {
      return cmd_bench(bench_family_from(family),
                       scale == "full" ? BenchScale::full : BenchScale::desk,
                       out_dir, opt, std::cout, std::cerr);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }

  if (*compare) {
    return cmd_compare(csv_paths, std::cout, std::cerr);
  }
  return 0;
}
