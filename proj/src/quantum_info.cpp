#include "tdqmc/quantum_info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tdqmc/errors.hpp"
#include "tdqmc/kernels.hpp"

namespace tdqmc {

double ReducedDensityMatrix::hermiticity_error() const {
  return (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
}

double ReducedDensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(entries_, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("density matrix eigensolve failed");
  return es.eigenvalues().minCoeff();
}

ReducedDensityMatrix ReducedDensityMatrix::diagonal_part() const {
  Eigen::MatrixXd d = entries_.diagonal().asDiagonal();
  return ReducedDensityMatrix(std::move(d), trace_normalized_);
}

namespace {

ReducedDensityMatrix dense_from(const Grid& grid, std::span<const double> waves,
                                std::span<const std::size_t> members) {
  const std::size_t G = grid.size();
  Eigen::MatrixXd phi(G, members.size());
  for (std::size_t c = 0; c < members.size(); ++c)
    for (std::size_t r = 0; r < G; ++r) phi(r, c) = waves[members[c] * G + r];
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(G, G);
  rho.selfadjointView<Eigen::Lower>().rankUpdate(phi);
  rho.triangularView<Eigen::StrictlyUpper>() = rho.transpose();
  rho /= rho.trace();
  return ReducedDensityMatrix(std::move(rho), true);
}

}  // namespace

ReducedDensityMatrix reduced_density_matrix(const Grid& grid, std::span<const double> waves,
                                            std::size_t count) {
  if (count == 0) throw std::invalid_argument("reduced density matrix of an empty ensemble");
  if (waves.size() != count * grid.size())
    throw std::invalid_argument("wave storage does not match count × grid size");
  std::vector<std::size_t> all(count);
  std::iota(all.begin(), all.end(), 0);
  return dense_from(grid, waves, all);
}

double purity(const Grid& grid, std::span<const double> waves, std::size_t count, bool parallel) {
  if (count == 0) throw std::invalid_argument("purity of an empty ensemble");
  if (waves.size() != count * grid.size())
    throw std::invalid_argument("wave storage does not match count × grid size");
  const kernels::GramMoments m = parallel
                                     ? kernels::parallel::gram_moments(waves, count, grid.cell_volume())
                                     : kernels::serial::gram_moments(waves, count, grid.cell_volume());
  return m.sum_squares / (m.trace * m.trace);
}

double linear_entropy(const Grid& grid, std::span<const double> waves, std::size_t count,
                      bool parallel) {
  return 1.0 - purity(grid, waves, count, parallel);
}

double linear_coherence(const ReducedDensityMatrix& rdm) {
  const double diag = rdm.entries().diagonal().squaredNorm();
  return (1.0 - diag) - rdm.linear_entropy();
}

ZonePartition::ZonePartition(const Grid& grid, int zones_per_axis, ZoneMode mode)
    : dim_(grid.dim()), extent_(grid.extent()), n_(zones_per_axis), mode_(mode) {
  if (zones_per_axis < 1) throw ConfigError("zones per axis must be at least 1");
  if (mode == ZoneMode::strip_y && dim_ == 1) throw ConfigError("strip_y needs a 2D grid");
}

std::size_t ZonePartition::zone_count() const {
  const auto n = static_cast<std::size_t>(n_);
  return dim_ == 2 && mode_ == ZoneMode::cells ? n * n : n;
}

namespace {
int axis_zone(double x, double extent, int n) {
  double w = x - extent * std::floor(x / extent + 0.5);  // wrap into [-L/2, L/2)
  if (w >= 0.5 * extent) w -= extent;
  const int z = static_cast<int>(std::floor((w + 0.5 * extent) / extent * n));
  return std::clamp(z, 0, n - 1);
}
}  // namespace

std::size_t ZonePartition::zone_of(const Position& r) const {
  const int zx = axis_zone(r[0], extent_, n_);
  if (dim_ == 1 || mode_ == ZoneMode::strip_x) return static_cast<std::size_t>(zx);
  const int zy = axis_zone(r[1], extent_, n_);
  if (mode_ == ZoneMode::strip_y) return static_cast<std::size_t>(zy);
  return static_cast<std::size_t>(zx) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(zy);
}

std::array<int, 2> ZonePartition::zone_xy(std::size_t zone) const {
  const int z = static_cast<int>(zone);
  if (dim_ == 1 || mode_ == ZoneMode::strip_x) return {z, 0};
  if (mode_ == ZoneMode::strip_y) return {0, z};
  return {z / n_, z % n_};
}

Position ZonePartition::zone_centre(std::size_t zone) const {
  const auto [zx, zy] = zone_xy(zone);
  const double w = zone_width();
  auto centre = [&](int z) { return -0.5 * extent_ + (z + 0.5) * w; };
  Position p{0.0, 0.0};
  if (!(dim_ == 2 && mode_ == ZoneMode::strip_y)) p[0] = centre(zx);
  if (dim_ == 2 && mode_ != ZoneMode::strip_x) p[1] = centre(zy);
  return p;
}

ZonePartition make_partition(const Grid& grid, int zones_per_axis, ZoneMode mode) {
  return ZonePartition(grid, zones_per_axis, mode);
}

WaveEnsemble pooled_ensemble(const TdqmcState& st) {
  return {st.grid, st.waves, st.positions};
}

WaveEnsemble electron_ensemble(const TdqmcState& st, std::size_t i) {
  if (i >= st.N) throw std::out_of_range("electron index out of range");
  return {st.grid, st.electron_waves(i), st.electron_positions(i)};
}

GramMatrix gram_matrix(const WaveEnsemble& e, bool parallel) {
  GramMatrix g;
  g.count = e.count();
  g.values.resize(g.count * g.count);
  if (parallel)
    kernels::parallel::gram(e.waves, g.count, e.grid.cell_volume(), g.values);
  else
    kernels::serial::gram(e.waves, g.count, e.grid.cell_volume(), g.values);
  return g;
}

ReducedDensityMatrix local_density_matrix(const WaveEnsemble& e, const ZonePartition& partition,
                                          std::size_t zone) {
  std::vector<std::size_t> members;
  for (std::size_t k = 0; k < e.count(); ++k)
    if (partition.zone_of(e.positions[k]) == zone) members.push_back(k);
  if (members.empty()) throw EmptyZone("zone " + std::to_string(zone) + " holds no walkers");
  return dense_from(e.grid, e.waves, members);
}

namespace {

// Orders walkers by position, then by wave content, independent of storage order.
void canonical_sort(const WaveEnsemble& e, std::vector<std::size_t>& members) {
  std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
    const Position& pa = e.positions[a];
    const Position& pb = e.positions[b];
    if (pa != pb) return pa < pb;
    const auto wa = e.wave(a), wb = e.wave(b);
    return std::lexicographical_compare(wa.begin(), wa.end(), wb.begin(), wb.end());
  });
}

struct ZoneValues {
  double purity = 0.0;
  double diag_purity = 0.0;
};

// Purity of the trace-normalised zone matrix and of its diagonal, members in
// canonical order.
ZoneValues measure(const WaveEnsemble& e, const std::vector<std::size_t>& members, bool parallel) {
  const std::size_t G = e.grid.size();
  std::vector<double> block(members.size() * G);
  for (std::size_t c = 0; c < members.size(); ++c) {
    const auto w = e.wave(members[c]);
    std::copy(w.begin(), w.end(), block.begin() + static_cast<std::ptrdiff_t>(c * G));
  }
  const kernels::GramMoments m =
      parallel ? kernels::parallel::gram_moments(block, members.size(), e.grid.cell_volume())
               : kernels::serial::gram_moments(block, members.size(), e.grid.cell_volume());
  std::vector<double> diag(G, 0.0);
  for (std::size_t c = 0; c < members.size(); ++c)
    for (std::size_t r = 0; r < G; ++r) diag[r] += block[c * G + r] * block[c * G + r];
  const double scale = e.grid.cell_volume() / m.trace;
  double d2 = 0.0;
  for (double v : diag) d2 += (v * scale) * (v * scale);
  return {m.sum_squares / (m.trace * m.trace), d2};
}

}  // namespace

ZoneMaps zone_maps(const WaveEnsemble& e, const ZonePartition& partition, bool parallel) {
  const std::size_t Z = partition.zone_count();
  std::vector<std::vector<std::size_t>> members(Z);
  for (std::size_t k = 0; k < e.count(); ++k) members[partition.zone_of(e.positions[k])].push_back(k);

  ZoneMaps out;
  out.entropy = {partition, MapKind::local_linear_entropy, std::vector<double>(Z), {}};
  out.coherence = {partition, MapKind::local_coherence, std::vector<double>(Z), {}};
  std::vector<std::size_t> counts(Z);
  for (std::size_t z = 0; z < Z; ++z) {
    counts[z] = members[z].size();
    if (members[z].empty()) {
      out.entropy.values[z] = std::numeric_limits<double>::quiet_NaN();
      out.coherence.values[z] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    canonical_sort(e, members[z]);
    const ZoneValues v = measure(e, members[z], parallel);
    out.entropy.values[z] = 1.0 - v.purity;
    out.coherence.values[z] = v.purity - v.diag_purity;
  }
  out.entropy.walker_counts = counts;
  out.coherence.walker_counts = counts;
  return out;
}

ZoneMaps zone_maps(const TdqmcState& st, const ZonePartition& partition, ViewSpec view,
                   bool parallel) {
  switch (view.view) {
    case EnsembleView::pooled:
      return zone_maps(pooled_ensemble(st), partition, parallel);
    case EnsembleView::electron:
      return zone_maps(electron_ensemble(st, view.electron), partition, parallel);
    case EnsembleView::electron_mean:
      break;
  }
  const std::size_t Z = partition.zone_count();
  ZoneMaps acc;
  acc.entropy = {partition, MapKind::local_linear_entropy, std::vector<double>(Z, 0.0),
                 std::vector<std::size_t>(Z, 0)};
  acc.coherence = {partition, MapKind::local_coherence, std::vector<double>(Z, 0.0),
                   std::vector<std::size_t>(Z, 0)};
  std::vector<int> contributors(Z, 0);
  for (std::size_t i = 0; i < st.N; ++i) {
    const ZoneMaps one = zone_maps(electron_ensemble(st, i), partition, parallel);
    for (std::size_t z = 0; z < Z; ++z) {
      acc.entropy.walker_counts[z] += one.entropy.walker_counts[z];
      if (one.entropy.empty(z)) continue;
      acc.entropy.values[z] += one.entropy.values[z];
      acc.coherence.values[z] += one.coherence.values[z];
      ++contributors[z];
    }
  }
  for (std::size_t z = 0; z < Z; ++z) {
    if (contributors[z] == 0) {
      acc.entropy.values[z] = acc.coherence.values[z] = std::numeric_limits<double>::quiet_NaN();
    } else {
      acc.entropy.values[z] /= contributors[z];
      acc.coherence.values[z] /= contributors[z];
    }
  }
  acc.coherence.walker_counts = acc.entropy.walker_counts;
  return acc;
}

EntropyMap local_entropy_map(const TdqmcState& st, const ZonePartition& partition, ViewSpec view,
                             bool parallel) {
  return zone_maps(st, partition, view, parallel).entropy;
}

EntropyMap coherence_map(const TdqmcState& st, const ZonePartition& partition, ViewSpec view,
                         bool parallel) {
  return zone_maps(st, partition, view, parallel).coherence;
}

double global_linear_entropy(const TdqmcState& st, ViewSpec view, bool parallel) {
  const ZonePartition whole(st.grid, 1, ZoneMode::cells);
  return local_entropy_map(st, whole, view, parallel).values[0];
}

double global_purity(const TdqmcState& st, ViewSpec view, bool parallel) {
  return 1.0 - global_linear_entropy(st, view, parallel);
}

Field one_body_density(const WaveEnsemble& e) {
  Field n(e.grid);
  const std::size_t G = e.grid.size();
  for (std::size_t k = 0; k < e.count(); ++k) {
    const auto w = e.wave(k);
    for (std::size_t r = 0; r < G; ++r) n[r] += w[r] * w[r];
  }
  double total = 0.0;
  for (std::size_t r = 0; r < G; ++r) total += n[r];
  total *= e.grid.cell_volume();
  for (std::size_t r = 0; r < G; ++r) n[r] /= total;
  return n;
}

Field one_body_density(const TdqmcState& st) { return one_body_density(pooled_ensemble(st)); }

double effective_area(const Field& density) {
  double total = 0.0, sum2 = 0.0;
  for (double v : density.values()) total += v;
  for (double v : density.values()) sum2 += (v / total) * (v / total);
  return 1.0 / sum2;
}

}  // namespace tdqmc
