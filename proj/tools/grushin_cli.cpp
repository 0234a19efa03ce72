#include <CLI11.hpp>

#include <iostream>

#include "grushin/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Grushin operator experiments"};
  app.require_subcommand(1);
  grushin::RunOverrides ov;
  std::string config;
  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->fallthrough();
  run->add_option("config", config, "config file")->required();
  std::uint64_t seed = 0;
  std::string out;
  int threads = 0;
  auto* seed_opt = run->add_option("--seed", seed, "overrides the config seed");
  auto* out_opt = run->add_option("--out", out, "output root directory");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads");
  app.add_subcommand("list", "list experiment kinds");
  app.add_flag_callback("--version", [] {
    std::cout << grushin::kVersion << "\n";
    std::exit(0);
  });
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (*seed_opt) ov.seed = seed;
  if (*out_opt) ov.out = out;
  if (*threads_opt) ov.threads = threads;
  if (app.got_subcommand("list")) {
    grushin::list_experiments(std::cout);
    return 0;
  }
  return grushin::run_experiment(config, ov, std::cout, std::cerr);
}
