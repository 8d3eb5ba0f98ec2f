#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "tdqmc/grid.hpp"
#include "tdqmc/spectral.hpp"

namespace tdqmc {

/// Non-local length that switches the kernel to the mean-field limit (K = 1).
inline constexpr double kMeanFieldSigma = std::numeric_limits<double>::infinity();

/// One non-local length per electron, each > 0 or kMeanFieldSigma.
using SigmaParams = std::vector<double>;

void validate_sigma(const SigmaParams& sigma);

/// exp(-|r - rk|² / (2 sigma²)) with minimum-image distance; 1 when sigma is infinite.
double gaussian_kernel(const Grid& grid, const Position& r, const Position& rk, double sigma);

struct KernelWeights {
  std::vector<double> weights;
  double Z = 0.0;
};

/// weights[l] = K(positions_j[l], r_jk); Z = Σ weights.
KernelWeights kernel_weights(const Grid& grid, std::span<const Position> positions_j,
                             const Position& r_jk, double sigma);

/// Walker positions of all electrons, electron-major (index i*M + k).
struct WalkerSnapshot {
  std::size_t electrons = 0;
  std::size_t walkers = 0;
  std::span<const Position> positions;

  const Position& at(std::size_t i, std::size_t k) const { return positions[i * walkers + k]; }
  std::span<const Position> electron(std::size_t j) const {
    return positions.subspan(j * walkers, walkers);
  }
};

/// Effective repulsion felt by walker k of electron i, evaluated on every node:
/// Σ_{j≠i} (1/Z_j^k) Σ_l V_ee(r, r_j^l) K(r_j^l, r_j^k, σ_j), scaled by `strength`.
/// Direct evaluation; used as the reference for the batched builders.
Field effective_potential(std::size_t i, std::size_t k, const WalkerSnapshot& walkers,
                          const SigmaParams& sigma, const Grid& grid, double a,
                          double strength = 1.0);

enum class KernelRoute {
  /// Exact pairwise sum, O(M² G) per electron.
  direct,
  /// Partner walkers deposited on the grid; kernel-weighted partner
  /// potentials tabulated per grid centre and interpolated at r_j^k.
  gridded,
};

/// Builds every walker's effective potential from one snapshot.
///
/// For each partner electron j a contribution U_j^k(r) is prepared; the
/// potential of walker k of electron i is Σ_{j≠i} U_j^k. Prepared data is
/// read-only between build() calls, so accumulate() may run concurrently.
class EffectivePotentialBuilder {
 public:
  EffectivePotentialBuilder(const Grid& grid, double a, double strength, KernelRoute route);
  ~EffectivePotentialBuilder();
  EffectivePotentialBuilder(const EffectivePotentialBuilder&) = delete;
  EffectivePotentialBuilder& operator=(const EffectivePotentialBuilder&) = delete;

  void build(const WalkerSnapshot& walkers, const SigmaParams& sigma, bool parallel = true);

  /// out += Σ_{j≠i} U_j^k
  void accumulate(std::size_t i, std::size_t k, std::span<double> out) const;

  KernelRoute route() const { return route_; }

 private:
  struct Partner {
    bool mean_field = false;
    std::vector<double> rows;  // direct: M×G; gridded: G×G table (or one row)
    std::vector<double> z;     // gridded: per-centre normalisation
  };

  Grid grid_;
  double a_;
  double strength_;
  KernelRoute route_;
  std::unique_ptr<PeriodicConvolution> vee_;
  WalkerSnapshot snapshot_;
  std::vector<Position> snapshot_storage_;
  std::vector<Partner> partners_;
};

}  // namespace tdqmc
