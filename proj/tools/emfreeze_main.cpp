// emfreeze command-line entry point.
//
// Exit codes: 0 success, 1 usage error, 2 invalid configuration, 3 runtime failure.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "emfreeze/config.hpp"
#include "emfreeze/runner.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kConfig = 2, kRuntime = 3 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emergent-Hamiltonian freezing experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run an experiment and write CSV files plus manifest.json");
  run->add_option("config", config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides output.directory)");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a configuration without running it");
  validate->add_option("config", validate_path, "INI configuration file")->required()->check(CLI::ExistingFile);

  auto* list = app.add_subcommand("list-experiments", "Print the named experiments");
  auto* show = app.add_subcommand("show-defaults", "Print the full default configuration of an experiment");
  std::string show_name;
  show->add_option("experiment", show_name, "Experiment name")->required();
  auto* ver = app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*ver) {
      std::cout << "emfreeze " << emfreeze::version() << "\n";
    } else if (*list) {
      for (auto e : emfreeze::named_experiments()) std::cout << emfreeze::to_string(e) << "\n";
    } else if (*show) {
      std::cout << emfreeze::serialize(emfreeze::parse_config("[experiment]\nname = " + show_name + "\n"));
    } else if (*validate) {
      const auto cfg = emfreeze::load_config(validate_path);
      std::cout << "ok: " << emfreeze::to_string(cfg.experiment) << "\n";
    } else if (*run) {
      const auto cfg = emfreeze::load_config(config_path);
      std::optional<std::filesystem::path> out;
      if (!out_dir.empty()) out = out_dir;
      const auto summary = emfreeze::run_experiment(cfg, out);
      for (const auto& f : summary.files) std::cout << f.string() << "\n";
    }
  } catch (const emfreeze::ConfigError& e) {
    std::cerr << "emfreeze: invalid configuration: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "emfreeze: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}
