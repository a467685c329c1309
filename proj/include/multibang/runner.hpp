#pragma once

// Experiment plumbing behind the command line tool.

#include "multibang/config.hpp"
#include "multibang/ssn.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>

namespace multibang {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitEarlyStop = 2, kExitVerifyFailed = 3 };

struct RunOptions {
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
};

Penalty make_penalty(const ExperimentConfig &config);
BlochProblem make_bloch_problem(const ExperimentConfig &config);
ElasticityProblem make_elasticity_problem(const ExperimentConfig &config);
ContinuationSchedule make_schedule(const ExperimentConfig &config);
NewtonConfig make_newton_config(const ExperimentConfig &config);

/// One row per attempted level, in the order of decreasing gamma.
void write_report_csv(const std::filesystem::path &path, const SolveReport &report);

int run_experiment(const ExperimentConfig &config, std::ostream &out);
int verify_experiment(const ExperimentConfig &config, std::ostream &out);

/// Load, apply overrides, dispatch. Configuration errors map to kExitConfig.
int run_command(const std::string &config_path, const RunOptions &options, std::ostream &out,
                std::ostream &err);
int verify_command(const std::string &config_path, const RunOptions &options, std::ostream &out,
                   std::ostream &err);

} // namespace multibang
