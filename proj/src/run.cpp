#include "tdqmc/run.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>

#include "tdqmc/errors.hpp"
#include "tdqmc/oracle.hpp"

namespace tdqmc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

RunConfig apply(const RunConfig& config, const RunOptions& options) {
  RunConfig c = config;
  if (options.seed) c.ensemble.seed = *options.seed;
  if (options.output_directory) c.output_directory = *options.output_directory;
  c.validate();
  return c;
}

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

void write_summary(const std::string& path, const std::vector<std::pair<std::string, double>>& rows) {
  std::string text = "quantity,value\n";
  for (const auto& [k, v] : rows) text += k + "," + format_number(v) + "\n";
  write_text(path, text);
}

void write_manifest(const std::string& path, const std::string& command, const RunConfig& c,
                    nlohmann::json extra) {
  nlohmann::json m;
  m["schema_version"] = kManifestSchemaVersion;
  m["tool"] = "tdqmc";
  m["command"] = command;
  m["seed"] = c.ensemble.seed;
  m["config_ini"] = to_ini(c);
  for (auto& [k, v] : extra.items()) m[k] = v;
  write_text(path, m.dump(2) + "\n");
}

void log(const RunOptions& o, const std::string& msg) {
  if (o.verbose) std::cerr << msg << '\n';
}

std::vector<double> sigma_scan_rows(const SigmaScan& scan, std::vector<std::vector<double>>& rows) {
  std::vector<double> energies;
  for (const SigmaPoint& p : scan.curve) {
    rows.push_back({p.sigma, p.energy, static_cast<double>(p.report.steps_taken),
                    p.report.converged ? 1.0 : 0.0});
    energies.push_back(p.energy);
  }
  return energies;
}

}  // namespace

RunResult run(const RunConfig& config, const RunOptions& options) {
  const auto t0 = Clock::now();
  RunResult res;
  res.config = apply(config, options);
  RunConfig& c = res.config;
  const Grid grid = c.grid();
  const std::string dir = c.output_directory;
  nlohmann::json timings;

  if (!c.sigma_candidates.empty()) {
    const auto ts = Clock::now();
    log(options, "scanning " + std::to_string(c.sigma_candidates.size()) + " sigma candidates");
    res.scan = optimize_sigma(c.lattice, grid, c.ensemble, c.sigma_candidates, c.relax);
    c.ensemble.sigma = res.scan->sigma_best;
    timings["sigma_scan_s"] = seconds_since(ts);
    if (c.wants("sigma_scan")) {
      std::vector<std::vector<double>> rows;
      sigma_scan_rows(*res.scan, rows);
      write_table(join(dir, "sigma_scan.csv"), {"sigma", "energy", "steps", "converged"}, rows);
      res.artifacts.push_back("sigma_scan.csv");
    }
  }

  const auto tr = Clock::now();
  TdqmcState st = init_ensemble(c.lattice, grid, c.ensemble);
  log(options, "relaxing N=" + std::to_string(c.ensemble.N) + " M=" + std::to_string(c.ensemble.M));
  res.report = relax(st, c.lattice, c.relax);
  timings["relax_s"] = seconds_since(tr);

  const auto tm = Clock::now();
  const ZonePartition partition(grid, c.zones, c.zone_mode);
  const ZoneMaps maps = zone_maps(st, partition, c.view);
  res.purity = global_purity(st, c.view);
  res.pooled_purity = global_purity(st, {EnsembleView::pooled});
  res.electron_mean_purity = global_purity(st, {EnsembleView::electron_mean});
  const Field density = one_body_density(st);
  timings["measure_s"] = seconds_since(tm);

  if (c.wants("potential")) {
    export_field(sample_on_grid(c.lattice, grid), join(dir, "potential.csv"));
    res.artifacts.push_back("potential.csv");
  }
  if (c.wants("density")) {
    export_field(density, join(dir, "density.csv"));
    res.artifacts.push_back("density.csv");
  }
  if (c.wants("entropy_map")) {
    export_map(maps.entropy, join(dir, "entropy_map.csv"));
    res.artifacts.push_back("entropy_map.csv");
  }
  if (c.wants("coherence_map")) {
    export_map(maps.coherence, join(dir, "coherence_map.csv"));
    res.artifacts.push_back("coherence_map.csv");
  }
  if (c.wants("energy_trace")) {
    std::vector<std::vector<double>> rows;
    for (const EnergyRecord& r : res.report.energy_trace)
      rows.push_back({static_cast<double>(r.step), r.energy});
    write_table(join(dir, "energy_trace.csv"), {"step", "energy"}, rows);
    res.artifacts.push_back("energy_trace.csv");
  }
  if (c.wants("summary")) {
    write_summary(join(dir, "summary.csv"),
                  {{"N", static_cast<double>(c.ensemble.N)},
                   {"M", static_cast<double>(c.ensemble.M)},
                   {"sigma", c.ensemble.sigma},
                   {"steps", static_cast<double>(res.report.steps_taken)},
                   {"converged", res.report.converged ? 1.0 : 0.0},
                   {"energy", res.report.final_energy},
                   {"purity", res.purity},
                   {"linear_entropy", 1.0 - res.purity},
                   {"pooled_purity", res.pooled_purity},
                   {"electron_mean_purity", res.electron_mean_purity},
                   {"effective_area", effective_area(density)}});
    res.artifacts.push_back("summary.csv");
  }

  timings["total_s"] = seconds_since(t0);
  nlohmann::json extra;
  extra["sigma"] = number(c.ensemble.sigma);
  extra["timings"] = timings;
  extra["relaxation"] = {{"steps_taken", res.report.steps_taken},
                         {"converged", res.report.converged},
                         {"final_energy", res.report.final_energy},
                         {"tau", st.tau}};
  extra["results"] = {{"purity", res.purity},
                      {"linear_entropy", 1.0 - res.purity},
                      {"pooled_purity", res.pooled_purity},
                      {"electron_mean_purity", res.electron_mean_purity}};
  extra["artifacts"] = res.artifacts;
  // the σ scan already ran; the manifest records the resolved σ so a re-run
  // reproduces the same artifacts without scanning again
  RunConfig resolved = c;
  if (res.scan) {
    resolved.sigma_candidates.clear();
    extra["sigma_scan"] = nlohmann::json::array();
    for (const SigmaPoint& p : res.scan->curve)
      extra["sigma_scan"].push_back({{"sigma", number(p.sigma)}, {"energy", p.energy}});
  }
  res.manifest_path = join(dir, "manifest.json");
  write_manifest(res.manifest_path, "run", resolved, extra);
  return res;
}

RunConfig config_from_manifest(const std::string& path) {
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": not a valid manifest: " + e.what());
  }
  if (!m.contains("schema_version") || m["schema_version"] != kManifestSchemaVersion)
    throw ConfigError(path + ": unsupported manifest schema version");
  if (!m.contains("config_ini") || !m["config_ini"].is_string())
    throw ConfigError(path + ": manifest has no config_ini");
  return parse_config(m["config_ini"].get<std::string>(), path);
}

OracleResult run_oracle(const RunConfig& config, bool with_hartree, const RunOptions& options) {
  const RunConfig c = apply(config, options);
  const auto t0 = Clock::now();
  const Grid grid = c.grid();
  const std::string dir = c.output_directory;
  OracleResult res;
  nlohmann::json extra;
  const ZonePartition partition(grid, c.zones, c.zone_mode);

  if (c.ensemble.N == 1) {
    LatticeSpec one = c.lattice;
    const GroundState1p g = exact_ground_state_1p(sample_on_grid(one, grid));
    res.energy = g.energy;
    Field density(grid);
    for (std::size_t r = 0; r < grid.size(); ++r) density[r] = g.wave[r] * g.wave[r];
    export_field(density, join(dir, "oracle_density.csv"));
    res.artifacts.push_back("oracle_density.csv");
  } else if (c.ensemble.N == 2) {
    OracleParams p = c.oracle.params;
    p.vee_strength = c.relax.vee_strength;
    log(options, "solving the two-particle ground state");
    const ConfigSpaceWave psi = exact_ground_state_2p(c.lattice, grid, p);
    res.energy = psi.energy;
    res.purity = exact_rdm(psi).purity();
    export_field(exact_density(psi), join(dir, "oracle_density.csv"));
    const ZoneMaps maps = c.oracle.expected_maps
                              ? expected_zone_maps(psi, partition, c.oracle.samples)
                              : exact_zone_maps(psi, partition, c.oracle.samples, c.oracle.seed);
    export_map(maps.entropy, join(dir, "oracle_entropy_map.csv"));
    export_map(maps.coherence, join(dir, "oracle_coherence_map.csv"));
    res.artifacts.insert(res.artifacts.end(),
                         {"oracle_density.csv", "oracle_entropy_map.csv", "oracle_coherence_map.csv"});
    extra["exchange_asymmetry"] = psi.exchange_asymmetry();
    extra["steps"] = psi.steps;
  } else {
    throw ConfigError("ensemble.N: the exact oracle handles one or two electrons");
  }

  std::vector<std::pair<std::string, double>> summary{{"energy", res.energy},
                                                      {"purity", res.purity},
                                                      {"linear_entropy", 1.0 - res.purity}};
  if (with_hartree) {
    HartreeParams hp = c.oracle.hartree;
    hp.dtau = c.relax.step.dtau;
    hp.vee_strength = c.relax.vee_strength;
    hp.init_width = c.ensemble.init_width;
    const HartreeResult h = hartree_solve(c.lattice, grid, c.ensemble.N, hp);
    export_field(h.density, join(dir, "hartree_density.csv"));
    res.artifacts.push_back("hartree_density.csv");
    summary.push_back({"hartree_energy", h.energy});
    summary.push_back({"hartree_converged", h.converged ? 1.0 : 0.0});
  }
  write_summary(join(dir, "oracle_summary.csv"), summary);
  res.artifacts.push_back("oracle_summary.csv");
  extra["timings"] = {{"total_s", seconds_since(t0)}};
  extra["results"] = {{"energy", res.energy}, {"purity", res.purity}};
  extra["artifacts"] = res.artifacts;
  write_manifest(join(dir, "oracle_manifest.json"), "oracle", c, extra);
  return res;
}

SigmaScan run_sweep(const RunConfig& config, const RunOptions& options) {
  const RunConfig c = apply(config, options);
  if (c.sigma_candidates.empty()) throw ConfigError("sigma.candidates: required for sweep-sigma");
  const SigmaScan scan = optimize_sigma(c.lattice, c.grid(), c.ensemble, c.sigma_candidates, c.relax);
  std::vector<std::vector<double>> rows;
  sigma_scan_rows(scan, rows);
  write_table(join(c.output_directory, "sigma_scan.csv"), {"sigma", "energy", "steps", "converged"},
              rows);
  nlohmann::json extra;
  extra["sigma_best"] = number(scan.sigma_best);
  write_manifest(join(c.output_directory, "sweep_manifest.json"), "sweep-sigma", c, extra);
  return scan;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("pearson: lengths differ");
  double ma = 0.0, mb = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::isfinite(a[i]) && std::isfinite(b[i])) {
      ma += a[i];
      mb += b[i];
      ++n;
    }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::isfinite(a[i]) && std::isfinite(b[i])) {
      sab += (a[i] - ma) * (b[i] - mb);
      saa += (a[i] - ma) * (a[i] - ma);
      sbb += (b[i] - mb) * (b[i] - mb);
    }
  return sab / std::sqrt(saa * sbb);
}

Comparison compare_values(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("compared series differ in length");
  Comparison c;
  double diff2 = 0.0, ref2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) continue;
    const double d = a[i] - b[i];
    diff2 += d * d;
    ref2 += b[i] * b[i];
    c.max_abs = std::max(c.max_abs, std::abs(d));
    ++c.compared;
  }
  c.pearson = pearson(a, b);
  c.rmse = c.compared ? std::sqrt(diff2 / static_cast<double>(c.compared)) : 0.0;
  c.l2_relative = ref2 > 0.0 ? std::sqrt(diff2 / ref2) : std::sqrt(diff2);
  return c;
}

Comparison compare_files(const std::string& pa, const std::string& pb) {
  const std::string head = read_text(pa).substr(0, 32);
  if (head.rfind("zone_x,zone_y,value,walker_count", 0) == 0) {
    const auto a = read_map(pa);
    const auto b = read_map(pb);
    if (a.size() != b.size()) throw ConfigError("maps have different zone counts");
    std::vector<double> va, vb;
    for (std::size_t n = 0; n < a.size(); ++n) {
      if (a[n].zone_x != b[n].zone_x || a[n].zone_y != b[n].zone_y)
        throw ConfigError("maps list zones in a different order");
      va.push_back(a[n].value);
      vb.push_back(b[n].value);
    }
    return compare_values(va, vb);
  }
  const ProfileData a = read_profile(pa);
  const ProfileData b = read_profile(pb);
  if (a.columns != b.columns || a.rows.size() != b.rows.size())
    throw ConfigError("profiles have different shapes");
  std::vector<double> va, vb;
  for (std::size_t n = 0; n < a.rows.size(); ++n) {
    va.push_back(a.rows[n].back());
    vb.push_back(b.rows[n].back());
  }
  return compare_values(va, vb);
}

}  // namespace tdqmc
