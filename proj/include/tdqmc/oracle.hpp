#pragma once

#include <cstdint>
#include <vector>

#include "tdqmc/grid.hpp"
#include "tdqmc/potentials.hpp"
#include "tdqmc/quantum_info.hpp"

namespace tdqmc {

struct GroundState1p {
  Field wave;
  double energy = 0.0;
};

/// Lowest eigenpair of -(1/2)∇² + V with the spectral Laplacian. Dense
/// diagonalisation up to `dense_limit` nodes, imaginary time beyond.
GroundState1p exact_ground_state_1p(const Field& potential, std::size_t dense_limit = 2048);

struct OracleParams {
  /// Imaginary-time steps used in turn, each run until the energy settles.
  std::vector<double> dtau_schedule{0.1, 0.03, 0.01};
  double energy_tol = 1e-11;
  std::size_t max_steps_per_stage = 20000;
  std::size_t check_every = 10;
  /// Largest configuration-space point count accepted.
  std::size_t budget = std::size_t{1} << 22;
  double vee_strength = 1.0;

  void validate() const;
};

/// Two-particle wave on the product grid, Ψ(r1, r2) at index r1*G + r2,
/// normalised with measure h^(2 dim).
struct ConfigSpaceWave {
  Grid grid;
  std::vector<double> values;
  double energy = 0.0;
  std::size_t steps = 0;

  double operator()(std::size_t r1, std::size_t r2) const { return values[r1 * grid.size() + r2]; }
  /// ‖Ψ(r1,r2) - Ψ(r2,r1)‖ with measure.
  double exchange_asymmetry() const;
};

/// Imaginary-time relaxation of two particles in the first two non-vacant
/// sites' lattice, Strang split-step on the 2·dim configuration space.
/// Throws ConfigError when G² exceeds the budget.
ConfigSpaceWave exact_ground_state_2p(const LatticeSpec& spec, const Grid& grid,
                                      const OracleParams& params = {});

/// ρ(r, r') = ∫Ψ(r, r2) Ψ(r', r2) dr2, trace-normalised.
ReducedDensityMatrix exact_rdm(const ConfigSpaceWave& psi);
Field exact_density(const ConfigSpaceWave& psi);

/// Conditional-wave ensemble: partner positions drawn from the marginal of
/// particle 2, φ^k = Ψ(·, r2^k)/‖·‖, walker k drawn from |φ^k|² (node by
/// weight, then uniform inside the cell). Waves are stored contiguously.
struct ConditionalEnsemble {
  Grid grid;
  std::vector<double> waves;
  std::vector<Position> positions;

  WaveEnsemble view() const { return {grid, waves, positions}; }
};

ConditionalEnsemble conditional_ensemble(const ConfigSpaceWave& psi, std::size_t n_samples,
                                         std::uint64_t seed);

/// The TDQMC zone construction applied to the conditional-wave ensemble.
ZoneMaps exact_zone_maps(const ConfigSpaceWave& psi, const ZonePartition& partition,
                         std::size_t n_samples, std::uint64_t seed = 7);
/// Infinite-sample limit of exact_zone_maps: every partner node weighted by
/// its exact joint probability with the zone, so the maps carry no sampling
/// noise. Walker counts report the expected occupancy out of `nominal_samples`
/// (at least 1 in any zone with non-zero probability).
ZoneMaps expected_zone_maps(const ConfigSpaceWave& psi, const ZonePartition& partition,
                            std::size_t nominal_samples);
EntropyMap exact_local_entropy_map(const ConfigSpaceWave& psi, const ZonePartition& partition,
                                   std::size_t n_samples, std::uint64_t seed = 7);

struct HartreeParams {
  double dtau = 0.01;
  std::size_t max_steps = 200000;
  double density_tol = 1e-13;  // L∞ change of any orbital density per step
  double vee_strength = 1.0;
  double init_width = 1.0;
};

struct HartreeResult {
  std::vector<Field> orbitals;
  Field density;  // electron-averaged, ∫ = 1
  double energy = 0.0;
  std::size_t steps = 0;
  bool converged = false;
};

/// Deterministic Hartree fixed point for N electrons on the first N
/// non-vacant sites: each orbital relaxes in V_en + Σ_{j≠i} ∫V_ee |φ_j|²,
/// with the same split-step and Gaussian start as the ensemble.
HartreeResult hartree_solve(const LatticeSpec& spec, const Grid& grid, std::size_t N,
                            const HartreeParams& params = {});

}  // namespace tdqmc
