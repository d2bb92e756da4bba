// nldtn <experiment> [--config path.json] [--out dir] [--seed n] [--print-defaults]
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nldtn/cli/config.hpp"
#include "nldtn/cli/runner.hpp"
#include "nldtn/error.hpp"

using namespace nldtn;
using namespace nldtn::cli;

namespace {

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ConfigInvalid: return kExitConfig;
    case ErrorCode::IoError: return kExitIo;
    default: return kExitNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear Dirichlet-to-Neumann laboratory"};
  std::string experiment;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  app.add_option("experiment", experiment, "forward | asymptotics | identity | cgo | moments | recover")->required();
  app.add_option("--config", config_path, "JSON configuration (defaults are used without one)");
  auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  auto* seed_opt = app.add_option("--seed", seed, "seed for randomized draws (overrides seed)");
  bool print_defaults = false;
  app.add_flag("--print-defaults", print_defaults, "print the experiment's default config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const auto exp = experiment_from_string(experiment);
    if (!exp) throw Error(ErrorCode::ConfigInvalid, "unknown experiment \"" + experiment + "\"");

    if (print_defaults) {
      std::cout << default_document(*exp).dump(2) << "\n";
      return kExitOk;
    }

    ExperimentConfig cfg;
    if (config_path.empty()) {
      cfg = default_config(*exp);
    } else {
      std::ifstream is(config_path, std::ios::binary);
      if (!is) throw Error(ErrorCode::IoError, "cannot read " + config_path);
      std::stringstream ss;
      ss << is.rdbuf();
      cfg = parse_config(ss.str(), config_path);
      if (cfg.experiment != *exp)
        throw Error(ErrorCode::ConfigInvalid, config_path + " describes experiment \"" +
                                                  std::string(to_string(cfg.experiment)) + "\", not \"" + experiment + "\"");
    }
    if (*out_opt) cfg.output_dir = out_dir;
    if (*seed_opt) cfg.seed = seed;

    const ExperimentOutput out = run_experiment(cfg);
    write_outputs(out, cfg);

    std::size_t checked = 0, failed = 0;
    for (const auto& r : out.rows) {
      checked += r.checked();
      failed += !r.passed();
    }
    std::cout << experiment << ": " << checked - failed << "/" << checked << " tolerance rows pass; wrote "
              << cfg.output_dir << "/results.csv\n";
    return failed == 0 ? kExitOk : kExitToleranceFailed;
  } catch (const Error& e) {
    std::cerr << "nldtn: " << e.what() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "nldtn: " << e.what() << "\n";
    return kExitNumerical;
  }
}
