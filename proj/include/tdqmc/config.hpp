#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tdqmc/ensemble.hpp"
#include "tdqmc/oracle.hpp"
#include "tdqmc/quantum_info.hpp"

namespace tdqmc {

struct OracleConfig {
  std::size_t samples = 4000;  // conditional waves for the exact maps
  std::uint64_t seed = 7;
  bool expected_maps = false;  // true: infinite-sample limit instead of sampling
  OracleParams params;
  HartreeParams hartree;
};

/// Everything a run needs. Defaults carry the lattice parameters a = 1,
/// V0 = -1, lambda = 1.11 and a 21-zone partition.
struct RunConfig {
  LatticeSpec lattice;
  double extent = 18.0;
  int points = 128;
  EnsembleOptions ensemble;
  bool n_from_sites = true;  // N defaults to the number of non-vacant sites
  RelaxParams relax;
  std::vector<double> sigma_candidates;  // non-empty: optimise σ before the run
  int zones = 21;
  ZoneMode zone_mode = ZoneMode::cells;
  ViewSpec view;
  OracleConfig oracle;
  std::string output_directory = "out";
  std::vector<std::string> artifacts;  // empty: everything

  Grid grid() const { return Grid(lattice.dim, extent, points); }
  bool wants(const std::string& artifact) const;
  /// Cross-module checks; throws ConfigError naming the offending key.
  void validate() const;
};

/// Flat INI document, one section per module. Unknown sections or keys are
/// rejected with a suggestion; parse errors carry the line number.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Canonical INI text that parses back to an identical RunConfig.
std::string to_ini(const RunConfig& config);

/// "0..8", "0,1,3"; in 2D "0:0,1:0" or "0..2:0..1" (Cartesian ranges).
std::vector<Site> parse_sites(const std::string& text, int dim);
std::string format_sites(const std::vector<Site>& sites, int dim);

/// Accepts finite numbers and "inf".
double parse_number(const std::string& text, const std::string& key);
std::string format_number(double value);

std::string closest_key(const std::string& key, const std::vector<std::string>& known);

}  // namespace tdqmc
