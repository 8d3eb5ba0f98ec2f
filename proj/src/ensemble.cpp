#include "tdqmc/ensemble.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "tdqmc/errors.hpp"
#include "tdqmc/kernels.hpp"

namespace tdqmc {

TdqmcState init_ensemble(const LatticeSpec& spec, const Grid& grid, const EnsembleOptions& opts) {
  spec.validate();
  if (spec.dim != grid.dim()) throw ConfigError("lattice and grid dimensions differ");
  if (opts.N < 1) throw ConfigError("N must be at least 1");
  if (opts.M < 1) throw ConfigError("M must be at least 1");
  if (!(opts.init_width > 0.0)) throw ConfigError("init_width must be positive");
  const std::vector<Position> sites = spec.effective_positions();
  if (opts.N > sites.size())
    throw ConfigError("N = " + std::to_string(opts.N) + " exceeds the " +
                      std::to_string(sites.size()) + " available sites");

  TdqmcState st;
  st.grid = grid;
  st.N = opts.N;
  st.M = opts.M;
  st.seed = opts.seed;
  st.sigma.assign(opts.N, opts.sigma);
  validate_sigma(st.sigma);
  st.centres.assign(sites.begin(), sites.begin() + static_cast<std::ptrdiff_t>(opts.N));

  const std::size_t G = grid.size();
  st.waves.resize(opts.N * opts.M * G);
  st.positions.resize(opts.N * opts.M);
  st.rngs.reserve(opts.N * opts.M);
  const double s = opts.init_width;
  for (std::size_t i = 0; i < opts.N; ++i) {
    Field g(grid);
    for (std::size_t r = 0; r < G; ++r)
      g[r] = std::exp(-grid.distance2(grid.node_position(r), st.centres[i]) / (4.0 * s * s));
    g.normalize();
    for (std::size_t k = 0; k < opts.M; ++k) {
      std::copy(g.values().begin(), g.values().end(), st.wave(i, k).begin());
      std::seed_seq seq{static_cast<std::uint64_t>(opts.seed), static_cast<std::uint64_t>(i),
                        static_cast<std::uint64_t>(k)};
      st.rngs.emplace_back(seq);
      std::normal_distribution<double> normal;
      Position r = st.centres[i];
      r[0] += s * normal(st.rngs.back());
      if (grid.dim() == 2) r[1] += s * normal(st.rngs.back());
      st.position(i, k) = grid.wrap(r);
    }
  }
  return st;
}

void RelaxParams::validate() const {
  step.validate();
  if (max_steps < 1) throw ConfigError("max_steps must be at least 1");
  if (!(energy_tol > 0.0)) throw ConfigError("energy_tol must be positive");
  if (window < 1) throw ConfigError("window must be at least 1");
  if (record_every < 1) throw ConfigError("record_every must be at least 1");
  if (!(vee_strength >= 0.0)) throw ConfigError("vee_strength must be non-negative");
}

double total_energy(const TdqmcState& st, const Field& v_en, double a, double vee_strength,
                    bool parallel) {
  const SpectralKinetic kinetic(st.grid);
  const std::size_t count = st.N * st.M;
  std::vector<double> per_wave(count);
  auto one = [&](std::size_t w) {
    per_wave[w] = rayleigh_energy(std::span<const double>(st.waves).subspan(w * st.grid.size(),
                                                                            st.grid.size()),
                                  v_en.values(), kinetic);
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t w = 0; w < count; ++w) one(w);
  } else {
    for (std::size_t w = 0; w < count; ++w) one(w);
  }
  double e = 0.0;
  for (double v : per_wave) e += v;
  double pair = 0.0;
  if (vee_strength != 0.0) {
    for (std::size_t k = 0; k < st.M; ++k)
      for (std::size_t i = 0; i < st.N; ++i)
        for (std::size_t j = i + 1; j < st.N; ++j)
          pair += coulomb_ee(st.grid, st.position(i, k), st.position(j, k), a);
  }
  return (e + vee_strength * pair) / static_cast<double>(st.M);
}

double total_energy(const TdqmcState& st, const LatticeSpec& spec, double vee_strength,
                    bool parallel) {
  return total_energy(st, sample_on_grid(spec, st.grid), spec.a, vee_strength, parallel);
}

namespace {

double window_mean(const std::vector<EnergyRecord>& trace, std::size_t from, std::size_t to) {
  double acc = 0.0;
  for (std::size_t n = from; n < to; ++n) acc += trace[n].energy;
  return acc / static_cast<double>(to - from);
}

void step_walkers(TdqmcState& st, const StepParams& step, bool parallel) {
  const std::size_t count = st.N * st.M;
  auto one = [&](std::size_t w) {
    const std::span<const double> wave =
        std::span<const double>(st.waves).subspan(w * st.grid.size(), st.grid.size());
    std::normal_distribution<double> normal;
    Position noise{normal(st.rngs[w]), 0.0};
    if (st.grid.dim() == 2) noise[1] = normal(st.rngs[w]);
    st.positions[w] = step_walker(st.grid, st.positions[w], wave, step, noise, max_abs(wave));
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t w = 0; w < count; ++w) one(w);
  } else {
    for (std::size_t w = 0; w < count; ++w) one(w);
  }
}

}  // namespace

RelaxationReport relax(TdqmcState& st, const LatticeSpec& spec, const RelaxParams& params) {
  return relax(st, sample_on_grid(spec, st.grid), spec.a, params);
}

RelaxationReport relax(TdqmcState& st, const Field& v_en, double a, const RelaxParams& params) {
  params.validate();
  validate_sigma(st.sigma);
  if (!(v_en.grid() == st.grid)) throw ConfigError("external potential lives on a different grid");
  const auto t0 = std::chrono::steady_clock::now();
  const SpectralKinetic kinetic(st.grid);
  const std::vector<double> factor = kinetic.propagator_factor(params.step.dtau);
  EffectivePotentialBuilder builder(st.grid, a, params.vee_strength, params.route);
  const kernels::PotentialFill fill = [&](std::size_t w, std::span<double> v) {
    std::copy(v_en.values().begin(), v_en.values().end(), v.begin());
    builder.accumulate(w / st.M, w % st.M, v);
  };
  kernels::WaveStepArgs args{&kinetic, factor, st.waves, st.N * st.M, params.step.dtau,
                             st.grid.cell_volume(), &fill};

  RelaxationReport report;
  const std::size_t records_per_window = std::max<std::size_t>(1, params.window / params.record_every);
  for (std::size_t n = 1; n <= params.max_steps; ++n) {
    builder.build(st.snapshot(), st.sigma, params.parallel);
    try {
      if (params.parallel)
        kernels::parallel::step_waves(args);
      else
        kernels::serial::step_waves(args);
    } catch (const NumericalError& e) {
      throw NumericalError("relaxation diverged at step " + std::to_string(n) + ": " + e.what());
    }
    step_walkers(st, params.step, params.parallel);
    st.tau += params.step.dtau;
    report.steps_taken = n;

    if (n % params.record_every != 0) continue;
    const double e = total_energy(st, v_en, a, params.vee_strength, params.parallel);
    if (!std::isfinite(e))
      throw NumericalError("energy is not finite at step " + std::to_string(n));
    report.energy_trace.push_back({n, e});
    const std::size_t R = report.energy_trace.size();
    if (n >= params.min_steps && R >= 2 * records_per_window) {
      const double now = window_mean(report.energy_trace, R - records_per_window, R);
      const double before =
          window_mean(report.energy_trace, R - 2 * records_per_window, R - records_per_window);
      if (std::abs(now - before) < params.energy_tol * std::max(std::abs(now), 1e-12)) {
        report.converged = true;
        break;
      }
    }
  }
  if (report.energy_trace.empty())
    report.energy_trace.push_back(
        {report.steps_taken, total_energy(st, v_en, a, params.vee_strength, params.parallel)});
  const std::size_t R = report.energy_trace.size();
  report.final_energy = window_mean(report.energy_trace, R / 2, R);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

SigmaScan optimize_sigma(const LatticeSpec& spec, const Grid& grid, const EnsembleOptions& opts,
                         const std::vector<double>& candidates, const RelaxParams& params) {
  if (candidates.empty()) throw ConfigError("sigma candidate list is empty");
  SigmaScan scan;
  for (double s : candidates) {
    EnsembleOptions o = opts;
    o.sigma = s;
    TdqmcState st = init_ensemble(spec, grid, o);
    SigmaPoint p;
    p.sigma = s;
    p.report = relax(st, spec, params);
    p.energy = p.report.final_energy;
    scan.curve.push_back(std::move(p));
  }
  std::size_t best = 0;
  for (std::size_t n = 1; n < scan.curve.size(); ++n)
    if (scan.curve[n].energy < scan.curve[best].energy) best = n;
  scan.sigma_best = scan.curve[best].sigma;
  return scan;
}

}  // namespace tdqmc
