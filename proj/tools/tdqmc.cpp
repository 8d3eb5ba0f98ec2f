// tdqmc: relax TDQMC ensembles, produce exact baselines and compare them.

#include <CLI11.hpp>
#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "tdqmc/errors.hpp"
#include "tdqmc/run.hpp"

namespace {

void apply_thread_override() {
  if (const char* env = std::getenv("TDQMC_THREADS")) {
    const int n = std::atoi(env);
    if (n < 1) throw tdqmc::ConfigError("TDQMC_THREADS must be a positive integer");
    omp_set_num_threads(n);
  }
}

tdqmc::RunConfig load(const std::string& config, const std::string& manifest) {
  if (!manifest.empty()) return tdqmc::config_from_manifest(manifest);
  if (config.empty()) throw tdqmc::ConfigError("a config file or --manifest is required");
  return tdqmc::load_config(config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-dependent quantum Monte Carlo: local entanglement in lattices"};
  app.require_subcommand(1);

  std::string config, manifest, out;
  std::uint64_t seed = 0;
  bool verbose = false;
  bool hartree = false;
  std::string file_a, file_b;

  auto add_common = [&](CLI::App* sub, bool allow_manifest) {
    sub->add_option("config", config, "INI configuration file");
    if (allow_manifest) sub->add_option("--manifest", manifest, "re-run the config stored in a manifest");
    sub->add_option("--seed", seed, "override ensemble.seed");
    sub->add_option("-o,--out", out, "override output.directory");
    sub->add_flag("-v,--verbose", verbose, "progress on stderr");
  };

  CLI::App* run = app.add_subcommand("run", "relax an ensemble and export profiles, maps and a manifest");
  add_common(run, true);
  CLI::App* oracle = app.add_subcommand("oracle", "exact baselines for the same configuration");
  add_common(oracle, false);
  oracle->add_flag("--hartree", hartree, "also solve the Hartree fixed point");
  CLI::App* sweep = app.add_subcommand("sweep-sigma", "energy versus the non-local length");
  add_common(sweep, false);
  CLI::App* compare = app.add_subcommand("compare", "difference statistics of two maps or profiles");
  compare->add_option("a", file_a, "CSV under test")->required();
  compare->add_option("b", file_b, "reference CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    apply_thread_override();
    tdqmc::RunOptions opts;
    opts.verbose = verbose;
    if (run->count("--seed") || oracle->count("--seed") || sweep->count("--seed")) opts.seed = seed;
    if (!out.empty()) opts.output_directory = out;

    if (*run) {
      const tdqmc::RunResult r = tdqmc::run(load(config, manifest), opts);
      std::printf("energy %.10g  purity %.6f  S_L %.6f  steps %zu  converged %s\n",
                  r.report.final_energy, r.purity, 1.0 - r.purity, r.report.steps_taken,
                  r.report.converged ? "yes" : "no");
      std::printf("wrote %s\n", r.manifest_path.c_str());
    } else if (*oracle) {
      const tdqmc::OracleResult r = tdqmc::run_oracle(load(config, ""), hartree, opts);
      std::printf("exact energy %.10g  purity %.6f\n", r.energy, r.purity);
    } else if (*sweep) {
      const tdqmc::SigmaScan s = tdqmc::run_sweep(load(config, ""), opts);
      for (const auto& p : s.curve) std::printf("sigma %-8g energy %.10g\n", p.sigma, p.energy);
      std::printf("best sigma %g\n", s.sigma_best);
    } else if (*compare) {
      const tdqmc::Comparison c = tdqmc::compare_files(file_a, file_b);
      std::printf("compared %zu\npearson %.6f\nrmse %.6g\nmax_abs %.6g\nl2_relative %.6g\n", c.compared,
                  c.pearson, c.rmse, c.max_abs, c.l2_relative);
    }
  } catch (const tdqmc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const tdqmc::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const tdqmc::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
