#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "tdqmc/ensemble.hpp"
#include "tdqmc/grid.hpp"

namespace tdqmc {

/// Real symmetric density matrix over grid nodes with the measure folded in:
/// entries(r, r') = h^dim Σ w_k φ_k(r) φ_k(r'), so the trace is Σ_r entries(r, r).
class ReducedDensityMatrix {
 public:
  ReducedDensityMatrix() = default;
  explicit ReducedDensityMatrix(Eigen::MatrixXd entries, bool trace_normalized = true)
      : entries_(std::move(entries)), trace_normalized_(trace_normalized) {}

  const Eigen::MatrixXd& entries() const { return entries_; }
  std::size_t dimension() const { return static_cast<std::size_t>(entries_.rows()); }
  bool trace_normalized() const { return trace_normalized_; }

  double trace() const { return entries_.trace(); }
  double purity() const { return entries_.squaredNorm(); }
  double linear_entropy() const { return 1.0 - purity(); }
  double hermiticity_error() const;
  double min_eigenvalue() const;
  ReducedDensityMatrix diagonal_part() const;

 private:
  Eigen::MatrixXd entries_;
  bool trace_normalized_ = true;
};

/// Thrown when a zone holds no walkers (distinct from a zero entropy).
class EmptyZone : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense ρ = (1/M)Σ φ_k φ_kᵀ from `count` contiguous normalised waves.
ReducedDensityMatrix reduced_density_matrix(const Grid& grid, std::span<const double> waves,
                                            std::size_t count);

/// Tr ρ² through the Gram matrix, Σ_kl <φ_k|φ_l>² / (Σ_k <φ_k|φ_k>)².
double purity(const Grid& grid, std::span<const double> waves, std::size_t count,
              bool parallel = true);
double linear_entropy(const Grid& grid, std::span<const double> waves, std::size_t count,
                      bool parallel = true);

/// S_L(ρ_diag) - S_L(ρ) in the grid-node basis.
double linear_coherence(const ReducedDensityMatrix& rdm);

enum class ZoneMode {
  cells,    // n×n Cartesian cells in 2D, n strips in 1D
  strip_x,  // n strips along x
  strip_y,  // n strips along y (2D only)
};

/// Equal-width zones over the periodic box.
class ZonePartition {
 public:
  ZonePartition() = default;
  ZonePartition(const Grid& grid, int zones_per_axis, ZoneMode mode = ZoneMode::cells);

  int zones_per_axis() const { return n_; }
  ZoneMode mode() const { return mode_; }
  int dim() const { return dim_; }
  double extent() const { return extent_; }
  double zone_width() const { return extent_ / n_; }
  std::size_t zone_count() const;
  /// Zone of a position (wrapped first).
  std::size_t zone_of(const Position& r) const;
  /// (zone_x, zone_y) indices of a flat zone.
  std::array<int, 2> zone_xy(std::size_t zone) const;
  /// Centre of a zone along each axis (0 on axes the zone spans entirely).
  Position zone_centre(std::size_t zone) const;

 private:
  int dim_ = 1;
  double extent_ = 1.0;
  int n_ = 21;
  ZoneMode mode_ = ZoneMode::cells;
};

ZonePartition make_partition(const Grid& grid, int zones_per_axis = 21,
                             ZoneMode mode = ZoneMode::cells);

/// Which walker ensemble a measure is taken over.
enum class EnsembleView {
  /// All N·M waves together. For identical electrons this is the one-body
  /// matrix of the exchange-symmetrised state.
  pooled,
  /// Mean over electrons of the single-electron measure.
  electron_mean,
  /// One electron's M waves.
  electron,
};

struct ViewSpec {
  EnsembleView view = EnsembleView::pooled;
  std::size_t electron = 0;  // used by EnsembleView::electron
};

enum class MapKind { local_linear_entropy, local_coherence };

struct EntropyMap {
  ZonePartition partition;
  MapKind kind = MapKind::local_linear_entropy;
  std::vector<double> values;  // NaN marks an empty zone
  std::vector<std::size_t> walker_counts;

  bool empty(std::size_t zone) const { return walker_counts[zone] == 0; }
};

/// Walkers and their waves, paired by index. `waves` holds count × G values.
struct WaveEnsemble {
  Grid grid;
  std::span<const double> waves;
  std::span<const Position> positions;

  std::size_t count() const { return positions.size(); }
  std::span<const double> wave(std::size_t k) const {
    return waves.subspan(k * grid.size(), grid.size());
  }
};

WaveEnsemble pooled_ensemble(const TdqmcState& state);
WaveEnsemble electron_ensemble(const TdqmcState& state, std::size_t i);

/// Gram matrix of an ensemble, with measure weight.
struct GramMatrix {
  std::size_t count = 0;
  std::vector<double> values;
  double operator()(std::size_t k, std::size_t l) const { return values[k * count + l]; }
};

GramMatrix gram_matrix(const WaveEnsemble& ensemble, bool parallel = true);

/// Eq.(9)-style zone matrix: walkers inside `zone`, trace-normalised.
/// Throws EmptyZone when the zone holds no walker.
ReducedDensityMatrix local_density_matrix(const WaveEnsemble& ensemble,
                                          const ZonePartition& partition, std::size_t zone);

/// Local entropy and coherence maps of one ensemble, each zone through the
/// Gram route restricted to its walkers. Walkers enter every sum in a
/// canonical order, so permuting the ensemble leaves both maps bit-identical.
struct ZoneMaps {
  EntropyMap entropy;
  EntropyMap coherence;
};

ZoneMaps zone_maps(const WaveEnsemble& ensemble, const ZonePartition& partition,
                   bool parallel = true);

ZoneMaps zone_maps(const TdqmcState& state, const ZonePartition& partition, ViewSpec view = {},
                   bool parallel = true);
EntropyMap local_entropy_map(const TdqmcState& state, const ZonePartition& partition,
                             ViewSpec view = {}, bool parallel = true);
EntropyMap coherence_map(const TdqmcState& state, const ZonePartition& partition,
                         ViewSpec view = {}, bool parallel = true);

/// Global purity of the chosen view, through the same canonical-order route
/// as the maps (a one-zone map equals 1 - global_purity exactly).
double global_linear_entropy(const TdqmcState& state, ViewSpec view = {}, bool parallel = true);
double global_purity(const TdqmcState& state, ViewSpec view = {}, bool parallel = true);

/// Electron-averaged one-body density Σ_r n(r) h^dim = 1, from the waves.
Field one_body_density(const TdqmcState& state);
Field one_body_density(const WaveEnsemble& ensemble);

/// 1 / Σ_r p(r)² with p the normalised diagonal of ρ: the effective number
/// of nodes the state is spread over.
double effective_area(const Field& density);

}  // namespace tdqmc
