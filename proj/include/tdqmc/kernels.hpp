#pragma once

// Hot loops of a relaxation step and of the entropy measures. Each kernel
// exists twice: `serial` is the plain reference, `parallel` distributes the
// same per-item work with OpenMP. Both produce bit-identical results because
// every output element is computed by exactly one iteration body.

#include <cstddef>
#include <functional>
#include <span>

#include "tdqmc/grid.hpp"
#include "tdqmc/spectral.hpp"

namespace tdqmc::kernels {

/// rows[k*G + r] = strength/Z_k Σ_l K(r_l, r_k; sigma) V_ee(node r, r_l), one
/// row per partner walker k. With an infinite sigma only row 0 is written.
struct DirectRowsArgs {
  const Grid* grid = nullptr;
  std::span<const Position> partners;
  double sigma = 1.0;
  double a = 1.0;
  double strength = 1.0;
};

/// Kernel-weighted partner potential tabulated per grid centre c:
/// table[c*G + r] = strength Σ_s V_ee(r - s) K(s - c) h(s), z[c] = Σ_s K(s - c) h(s),
/// where h is the cloud-in-cell deposit of the partner walkers. Only centres
/// with needed[c] != 0 are filled.
struct GriddedTableArgs {
  const Grid* grid = nullptr;
  const PeriodicConvolution* vee = nullptr;  // V_ee convolution, strength folded in
  std::span<const double> deposit;           // h(s)
  std::span<const double> kernel_offsets;    // K at each minimum-image offset
  std::span<const unsigned char> needed;
};

/// Called per (wave index, scratch) to write the total potential of that wave.
using PotentialFill = std::function<void(std::size_t, std::span<double>)>;

struct WaveStepArgs {
  const SpectralKinetic* kinetic = nullptr;
  std::span<const double> kinetic_factor;
  std::span<double> waves;  // count × G, contiguous
  std::size_t count = 0;
  double dtau = 0.01;
  double cell_volume = 1.0;
  const PotentialFill* potential = nullptr;
};

/// Trace and squared Frobenius norm of the Gram matrix, without storing it.
struct GramMoments {
  double trace = 0.0;
  double sum_squares = 0.0;
};

namespace serial {
void direct_rows(const DirectRowsArgs& args, std::span<double> rows);
void gridded_table(const GriddedTableArgs& args, std::span<double> table, std::span<double> z);
void step_waves(const WaveStepArgs& args);
/// out[k*count + l] = cell_volume Σ_r w_k(r) w_l(r)
void gram(std::span<const double> waves, std::size_t count, double cell_volume,
          std::span<double> out);
GramMoments gram_moments(std::span<const double> waves, std::size_t count, double cell_volume);
}  // namespace serial

namespace parallel {
void direct_rows(const DirectRowsArgs& args, std::span<double> rows);
void gridded_table(const GriddedTableArgs& args, std::span<double> table, std::span<double> z);
void step_waves(const WaveStepArgs& args);
void gram(std::span<const double> waves, std::size_t count, double cell_volume,
          std::span<double> out);
GramMoments gram_moments(std::span<const double> waves, std::size_t count, double cell_volume);
}  // namespace parallel

/// Cloud-in-cell deposit (weights of the interpolation stencil) of positions.
std::vector<double> deposit(const Grid& grid, std::span<const Position> positions);

/// K evaluated at the minimum-image displacement of every flat offset.
std::vector<double> kernel_offsets(const Grid& grid, double sigma);

/// Flat index of the offset node a - b (periodic).
inline std::size_t offset_index(const Grid& grid, std::size_t a, std::size_t b) {
  const std::size_t n = static_cast<std::size_t>(grid.points_per_axis());
  if (grid.dim() == 1) return (a + n - b) % n;
  const std::size_t ax = a / n, ay = a % n, bx = b / n, by = b % n;
  return ((ax + n - bx) % n) * n + (ay + n - by) % n;
}

}  // namespace tdqmc::kernels
