#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tdqmc/grid.hpp"
#include "tdqmc/nonlocal_kernel.hpp"
#include "tdqmc/potentials.hpp"
#include "tdqmc/propagator.hpp"

namespace tdqmc {

/// N electrons × M walkers, each walker carrying its own guide wave.
/// Waves are stored contiguously, electron-major: wave(i, k) starts at
/// ((i*M) + k) * G. Guide waves stay real in imaginary time.
struct TdqmcState {
  Grid grid;
  std::size_t N = 0;
  std::size_t M = 0;
  std::vector<double> waves;
  std::vector<Position> positions;
  std::vector<Position> centres;  // site each electron was started on
  std::vector<std::mt19937_64> rngs;
  SigmaParams sigma;
  double tau = 0.0;
  std::uint64_t seed = 0;

  std::span<double> wave(std::size_t i, std::size_t k) {
    return std::span<double>(waves).subspan((i * M + k) * grid.size(), grid.size());
  }
  std::span<const double> wave(std::size_t i, std::size_t k) const {
    return std::span<const double>(waves).subspan((i * M + k) * grid.size(), grid.size());
  }
  /// All M waves of electron i.
  std::span<const double> electron_waves(std::size_t i) const {
    return std::span<const double>(waves).subspan(i * M * grid.size(), M * grid.size());
  }
  std::span<const Position> electron_positions(std::size_t i) const {
    return std::span<const Position>(positions).subspan(i * M, M);
  }
  Position& position(std::size_t i, std::size_t k) { return positions[i * M + k]; }
  const Position& position(std::size_t i, std::size_t k) const { return positions[i * M + k]; }
  WalkerSnapshot snapshot() const { return {N, M, positions}; }
};

struct EnsembleOptions {
  std::size_t N = 1;
  std::size_t M = 100;
  double sigma = 1.0;  // shared by all electrons; kMeanFieldSigma for mean field
  std::uint64_t seed = 1;
  double init_width = 1.0;  // s in φ ∝ exp(-|r-R|²/(4s²))
};

/// Identical Gaussians on the first N non-vacant sites (in `spec.sites`
/// order), walkers drawn from |φ|². Deterministic under `seed`.
TdqmcState init_ensemble(const LatticeSpec& spec, const Grid& grid, const EnsembleOptions& opts);

struct RelaxParams {
  StepParams step;
  std::size_t max_steps = 2000;
  std::size_t min_steps = 0;
  double energy_tol = 1e-6;
  std::size_t window = 100;       // steps per convergence window
  std::size_t record_every = 10;  // energy sampling stride in steps
  double vee_strength = 1.0;      // 0 disables electron-electron repulsion
  KernelRoute route = KernelRoute::gridded;
  bool parallel = true;

  void validate() const;
};

struct EnergyRecord {
  std::size_t step = 0;
  double energy = 0.0;
};

struct RelaxationReport {
  std::size_t steps_taken = 0;
  std::vector<EnergyRecord> energy_trace;
  bool converged = false;
  /// Mean of the trailing half of the energy trace (the estimator is noisy).
  double final_energy = 0.0;
  double seconds = 0.0;
};

/// Self-consistent imaginary-time relaxation: snapshot walkers, build the
/// effective potentials, step every wave, then step every walker under its
/// updated wave. Converged when the mean energies of the last two windows
/// differ by less than energy_tol relative. Throws NumericalError with the
/// step index on divergence.
RelaxationReport relax(TdqmcState& state, const LatticeSpec& spec, const RelaxParams& params);
/// Same, in an arbitrary external potential sampled on the state's grid.
RelaxationReport relax(TdqmcState& state, const Field& v_en, double a, const RelaxParams& params);

/// Σ_i (1/M)Σ_k <φ_i^k|T + V_en|φ_i^k> + (1/M)Σ_k Σ_{i<j} V_ee(r_i^k, r_j^k)
double total_energy(const TdqmcState& state, const LatticeSpec& spec, double vee_strength = 1.0,
                    bool parallel = true);
double total_energy(const TdqmcState& state, const Field& v_en, double a, double vee_strength,
                    bool parallel = true);

struct SigmaPoint {
  double sigma = 0.0;
  double energy = 0.0;
  RelaxationReport report;
};

struct SigmaScan {
  double sigma_best = 0.0;
  std::vector<SigmaPoint> curve;
};

/// Grid scan over a shared σ. Every candidate starts from the same seed, so
/// the curve compares candidates under common random numbers.
SigmaScan optimize_sigma(const LatticeSpec& spec, const Grid& grid, const EnsembleOptions& opts,
                         const std::vector<double>& candidates, const RelaxParams& params);

}  // namespace tdqmc
