#include <exception>
#include <iostream>
#include <string>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include "dualopt/cli/experiment.hpp"
#include "dualopt/errors.hpp"

namespace {

enum class Command { kSpectrum, kRun, kSweep };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-based distributed optimization experiments over simulated networks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  Command command = Command::kRun;

  auto add = [&](const char* name, const char* help, Command cmd, bool out_required) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON experiment config")->required()->check(
        CLI::ExistingFile);
    auto* out = sub->add_option("--out", out_dir, "Output directory");
    if (out_required) out->required();
    sub->callback([&command, cmd] { command = cmd; });
  };
  add("spectrum", "Print lambda_max, lambda_min_plus and chi of the configured graph",
      Command::kSpectrum, false);
  add("run", "Run one algorithm; write the trace CSV and summary JSON", Command::kRun, true);
  add("sweep", "Run over m_list and write m,chi,rounds_to_certificate", Command::kSweep, true);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = dualopt::cli::load_config(config_path);
    switch (command) {
      case Command::kSpectrum: return dualopt::cli::cmd_spectrum(cfg, out_dir, std::cout);
      case Command::kRun: return dualopt::cli::cmd_run(cfg, out_dir, std::cout);
      case Command::kSweep: return dualopt::cli::cmd_sweep(cfg, out_dir, std::cout);
    }
  } catch (const dualopt::MissingOracleError& e) {
    std::cerr << "error (missing oracle): " << e.what() << '\n';
  } catch (const dualopt::SingularSystemError& e) {
    std::cerr << "error (singular system): " << e.what() << '\n';
  } catch (const dualopt::NumericalError& e) {
    std::cerr << "error (numerical): " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 2;
}
