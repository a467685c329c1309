// multibang run|verify|echo <config> [--output-dir DIR] [--seed N]

#include "multibang/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char **argv) {
  CLI::App app{"Vector multibang optimal control experiments"};
  app.require_subcommand(1);

  std::string config;
  std::string output_dir;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App *cmd) {
    cmd->add_option("config", config, "experiment config file")->required();
    cmd->add_option("--output-dir", output_dir, "directory for artifacts");
    cmd->add_option("--seed", seed, "override the config seed");
  };
  auto *run = app.add_subcommand("run", "solve the configured experiment");
  auto *verify = app.add_subcommand("verify", "run the oracle and property suites");
  auto *echo = app.add_subcommand("echo", "print the parsed config in canonical form");
  add_common(run);
  add_common(verify);
  add_common(echo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : multibang::kExitConfig;
  }

  multibang::RunOptions options;
  if (!output_dir.empty()) options.output_dir = output_dir;
  for (auto *cmd : {run, verify, echo})
    if (cmd->count("--seed")) options.seed = seed;

  try {
    if (*run) return multibang::run_command(config, options, std::cout, std::cerr);
    if (*verify) return multibang::verify_command(config, options, std::cout, std::cerr);
    auto c = multibang::load_config(config);
    if (options.output_dir) c.output_dir = *options.output_dir;
    if (options.seed) c.seed = *options.seed;
    std::cout << multibang::echo_config(c);
    return 0;
  } catch (const multibang::ConfigError &e) {
    std::cerr << config << ": " << e.what() << '\n';
    return multibang::kExitConfig;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return multibang::kExitEarlyStop;
  }
}
