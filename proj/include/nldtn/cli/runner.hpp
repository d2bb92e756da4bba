#pragma once

#include <string>

#include "nldtn/cli/config.hpp"
#include "nldtn/cli/report.hpp"

namespace nldtn::cli {

// Runs one experiment. Everything in the config is validated (ConfigInvalid)
// before any computation starts; numerical failures propagate as nldtn::Error.
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

// results.csv, report.md and, when plotting is on and there is something to
// plot, convergence.svg under cfg.output_dir. IoError on any write failure.
void write_outputs(const ExperimentOutput& out, const ExperimentConfig& cfg);

// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitToleranceFailed = 1, kExitConfig = 2, kExitNumerical = 3, kExitIo = 4 };

}  // namespace nldtn::cli
