#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tdqmc/config.hpp"
#include "tdqmc/ensemble.hpp"
#include "tdqmc/io.hpp"

namespace tdqmc {

inline constexpr int kManifestSchemaVersion = 1;

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides ensemble.seed
  std::optional<std::string> output_directory;
  bool verbose = false;
};

struct RunResult {
  RunConfig config;  // as executed (overrides applied, σ resolved)
  std::optional<SigmaScan> scan;
  RelaxationReport report;
  double purity = 0.0;  // of the configured view
  double pooled_purity = 0.0;
  double electron_mean_purity = 0.0;
  std::vector<std::string> artifacts;
  std::string manifest_path;
};

/// init → (optional σ scan) → relax → measures → CSV artifacts + manifest.json.
RunResult run(const RunConfig& config, const RunOptions& options = {});

/// Re-executes the configuration stored in a manifest.
RunConfig config_from_manifest(const std::string& manifest_path);

struct OracleResult {
  double energy = 0.0;
  double purity = 1.0;
  std::vector<std::string> artifacts;
};

/// Exact baselines for the same configuration: one-body ground state for
/// N = 1, configuration-space ground state plus conditional-wave maps for
/// N = 2; optionally the Hartree fixed point.
OracleResult run_oracle(const RunConfig& config, bool with_hartree, const RunOptions& options = {});

/// σ scan only, written to sigma_scan.csv.
SigmaScan run_sweep(const RunConfig& config, const RunOptions& options = {});

struct Comparison {
  std::size_t compared = 0;  // pairs where both values are finite
  double pearson = 0.0;
  double rmse = 0.0;
  double max_abs = 0.0;
  double l2_relative = 0.0;  // ‖a - b‖ / ‖b‖
};

/// Pearson correlation over pairs where both entries are finite.
double pearson(const std::vector<double>& a, const std::vector<double>& b);
Comparison compare_values(const std::vector<double>& a, const std::vector<double>& b);
/// Compares two maps or two profiles (the kind is taken from the header).
Comparison compare_files(const std::string& a, const std::string& b);

}  // namespace tdqmc
