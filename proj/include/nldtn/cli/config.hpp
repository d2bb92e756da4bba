#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

namespace nldtn::cli {

enum class Experiment { Forward, Asymptotics, Identity, Cgo, Moments, Recover };

const char* to_string(Experiment e);
std::optional<Experiment> experiment_from_string(const std::string& name);

inline constexpr const char* kSchemaVersion = "1";

// Validated configuration. `probes` and `tolerances` hold the experiment
// defaults overlaid with the user's values; every key in them is known.
struct ExperimentConfig {
  Experiment experiment = Experiment::Moments;
  int dim = 2;
  int M = 16;
  nlohmann::json law;
  nlohmann::json probes;
  nlohmann::json tolerances;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  bool plot = true;
};

ExperimentConfig default_config(Experiment e);

// Parses and validates a config document. Syntax errors report line and
// column; structural problems report a JSON path. Both raise ConfigInvalid.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "config");

// The defaults document of an experiment (what default_config is built from).
nlohmann::json default_document(Experiment e);

}  // namespace nldtn::cli
