#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "emfreeze/config.hpp"

namespace emfreeze {

std::string_view version() noexcept;

/// Rectangular table of reals destined for one CSV file.
struct ResultTable {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Throws DomainError when the row width differs from the header.
  void add_row(std::vector<double> row);
};

struct ExperimentResult {
  std::vector<ResultTable> tables;
  nlohmann::json diagnostics = nlohmann::json::object();
};

/// Runs the physics of an experiment without touching the file system. Sweep
/// points run on up to `threads` workers; output order does not depend on it.
ExperimentResult compute_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

/// Header plus rows, "," delimited, shortest round-trip formatting.
std::string csv_text(const ResultTable& table);

std::string sha256_hex(std::string_view data);

/// Worker count from EMFREEZE_THREADS, capped by the hardware concurrency.
/// Throws ConfigError when the variable is set but not a positive integer.
unsigned worker_threads();

struct RunSummary {
  std::filesystem::path directory;
  std::vector<std::filesystem::path> files;  // CSVs then manifest.json
};

/// compute_experiment, then writes every table as <name>.csv and a
/// manifest.json sidecar. Nothing is left behind if any step fails.
RunSummary run_experiment(const ExperimentConfig& cfg,
                          const std::optional<std::filesystem::path>& out_override = {});

}  // namespace emfreeze
