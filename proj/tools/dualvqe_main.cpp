#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dualvqe/errors.hpp"
#include "dualvqe/experiment.hpp"
#include "dualvqe/version.hpp"

namespace {

int dispatch(const CLI::App& app, const std::string& config_path, const std::string& dir,
             const std::string& ham_path) {
  using namespace dualvqe;
  if (app.got_subcommand("run")) {
    const RunConfig cfg = RunConfig::load(config_path);
    const RunOutcome out = run(cfg);
    for (const std::string& w : out.summary.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << out.message << "\n";
    if (!cfg.output_dir.empty())
      std::cout << out.files.size() << " files in " << cfg.output_dir << "\n";
    return out.exit_code;
  }
  if (app.got_subcommand("summarize")) {
    const SummaryReport rep = summarize_directory(dir);
    for (const std::string& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << rep.to_json();
    return kExitSuccess;
  }
  RunConfig cfg;
  cfg.kind = ExperimentKind::oracle;
  cfg.hamiltonian_file = ham_path;
  const RunOutcome out = run(cfg);
  std::cout << out.message << "\n";
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground-state energy bracketing: VQE upper bounds, penalty-method dual lower "
               "bounds, tensor-network pretraining, and circuit translation."};
  app.set_version_flag("--version", dualvqe::kVersion);
  app.require_subcommand(1);

  std::string config_path, dir, ham_path;
  CLI::App* run_cmd = app.add_subcommand("run", "execute the experiment described by a config file");
  run_cmd->add_option("config", config_path, "key=value config file")->required();
  CLI::App* sum_cmd =
      app.add_subcommand("summarize", "rebuild summary.json and quartile CSVs from a run directory");
  sum_cmd->add_option("dir", dir, "directory holding trace CSVs and manifests")->required();
  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "print the dense minimum eigenvalue of a Hamiltonian file");
  oracle_cmd->add_option("hamiltonian", ham_path, "text file, one `coeff letters` term per line")
      ->required();

  CLI11_PARSE(app, argc, argv);
  try {
    return dispatch(app, config_path, dir, ham_path);
  } catch (const dualvqe::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dualvqe::kExitConfigError;
  } catch (const dualvqe::ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dualvqe::kExitConfigError;
  } catch (const dualvqe::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dualvqe::kExitNumericAbort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
