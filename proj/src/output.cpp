#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <thread>

#include "emfreeze/common.hpp"
#include "emfreeze/evolution.hpp"
#include "emfreeze/runner.hpp"

#ifndef EMFREEZE_VERSION
#define EMFREEZE_VERSION "0.0.0"
#endif

namespace emfreeze {

namespace fs = std::filesystem;

std::string_view version() noexcept { return EMFREEZE_VERSION; }

void ResultTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw DomainError("table " + name + ": row has " + std::to_string(row.size()) +
                      " values for " + std::to_string(columns.size()) + " columns");
  }
  rows.push_back(std::move(row));
}

std::string csv_text(const ResultTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += std::isnan(row[c]) ? std::string("nan") : format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

unsigned worker_threads() {
  const unsigned hw = std::max(1U, std::thread::hardware_concurrency());
  const char* env = std::getenv("EMFREEZE_THREADS");
  if (!env || !*env) return hw;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) {
    throw ConfigError(std::string("EMFREEZE_THREADS: expected a positive integer, got '") + env + "'");
  }
  return std::min(hw, static_cast<unsigned>(n));
}

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  f.close();
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

// Removes every staged or committed file unless released.
class Staging {
 public:
  ~Staging() {
    if (released_) return;
    std::error_code ec;
    for (const fs::path& p : paths_) fs::remove(p, ec);
  }
  void track(fs::path p) { paths_.push_back(std::move(p)); }
  void release() { released_ = true; }

 private:
  std::vector<fs::path> paths_;
  bool released_ = false;
};

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg, const std::optional<fs::path>& out_override) {
  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  const unsigned threads = worker_threads();
  const ExperimentResult result = compute_experiment(cfg, threads);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  RunSummary summary;
  summary.directory = out_override ? *out_override : fs::path(cfg.output_dir);
  fs::create_directories(summary.directory);

  Staging staging;
  std::vector<std::pair<fs::path, fs::path>> staged;
  nlohmann::json outputs = nlohmann::json::array();
  for (const ResultTable& table : result.tables) {
    const fs::path final_path = summary.directory / (table.name + ".csv");
    const fs::path partial = summary.directory / (table.name + ".csv.partial");
    staging.track(partial);
    const std::string text = csv_text(table);
    write_file(partial, text);
    staged.emplace_back(partial, final_path);
    outputs.push_back({{"file", final_path.filename().string()},
                       {"columns", table.columns},
                       {"rows", table.rows.size()},
                       {"sha256", sha256_hex(text)}});
  }

  const std::string config_text = serialize(cfg);
  nlohmann::json manifest = {
      {"experiment", to_string(cfg.experiment)},
      {"version", version()},
      {"config", config_text},
      {"config_sha256", sha256_hex(config_text)},
      {"started_utc", started},
      {"wall_clock_seconds", wall},
      {"threads", threads},
      {"tolerances",
       {{"state_norm", 1e-10},
        {"hermiticity", SparseHermitian::kTolerance},
        {"krylov_local_error", KrylovOptions{}.tolerance},
        {"auto_dense_threshold", kAutoDenseThreshold},
        {"dense_cap", kDefaultDenseCap}}},
      {"outputs", outputs},
      {"diagnostics", result.diagnostics},
  };
  const fs::path manifest_path = summary.directory / "manifest.json";
  const fs::path manifest_partial = summary.directory / "manifest.json.partial";
  staging.track(manifest_partial);
  write_file(manifest_partial, manifest.dump(2) + "\n");
  staged.emplace_back(manifest_partial, manifest_path);

  for (const auto& [partial, final_path] : staged) {
    staging.track(final_path);
    fs::rename(partial, final_path);
    summary.files.push_back(final_path);
  }
  staging.release();
  return summary;
}

}  // namespace emfreeze
