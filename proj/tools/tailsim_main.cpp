// Command line front end: runs experiment configs and dumps the task /
// model registries.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tailsim/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"tailsim: simulation and Monte Carlo verification toolkit for the extremes of "
               "stationary heavy-tailed continuous-time processes"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  int workers = 0;
  bool ci = false;

  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "JSON experiment config")->required();
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--workers", workers, "worker threads (0: auto)");
  run->add_option("--out", out_dir, "output directory for payloads and manifest.json");
  run->add_flag("--ci", ci, "one line per task, nonzero exit on any tolerance failure");

  auto* lsm = app.add_subcommand("list-models", "list registered model classes");
  auto* lst = app.add_subcommand("list-tasks", "list registered task tags");

  std::string task_name;
  auto* describe = app.add_subcommand("describe", "describe a registered task");
  describe->add_option("task", task_name, "task tag")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      tailsim::runner::RunOptions opts;
      opts.seed_override = seed;
      opts.workers = workers;
      opts.out_dir = out_dir;
      opts.ci = ci;
      auto manifest = tailsim::runner::run_config_file(config_path, opts);
      if (!ci) std::cout << tailsim::runner::manifest_to_json(manifest) << "\n";
      return manifest.all_passed ? 0 : 1;
    }
    if (*lsm) {
      for (const auto& m : tailsim::runner::list_model_classes()) std::cout << m << "\n";
      return 0;
    }
    if (*lst) {
      for (const auto& t : tailsim::runner::list_tasks()) std::cout << t << "\n";
      return 0;
    }
    if (*describe) {
      std::cout << task_name << ": " << tailsim::runner::describe_task(task_name) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
