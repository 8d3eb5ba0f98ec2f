#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "tdqmc/grid.hpp"

namespace tdqmc {

/// Periodic kinetic operator -(1/2)∇² in atomic units, applied spectrally.
///
/// Works on any rank: a single-particle grid (rank = dim) or a two-particle
/// configuration space (rank = 2*dim). All members are const and thread-safe
/// after construction; each calling thread gets its own FFT scratch.
class SpectralKinetic {
 public:
  /// `shape` lists points per axis (row-major, last axis fastest), `extents`
  /// the periodic length of each axis.
  SpectralKinetic(std::vector<int> shape, std::vector<double> extents);
  explicit SpectralKinetic(const Grid& grid);
  /// Configuration space of `particles` copies of `grid`.
  SpectralKinetic(const Grid& grid, int particles);
  ~SpectralKinetic();
  SpectralKinetic(const SpectralKinetic&) = delete;
  SpectralKinetic& operator=(const SpectralKinetic&) = delete;

  std::size_t size() const { return size_; }

  /// exp(-dtau k²/2) on the half spectrum; reuse it across many waves.
  std::vector<double> propagator_factor(double dtau) const;
  /// wave <- IFFT[factor * FFT[wave]]
  void propagate(std::span<double> wave, std::span<const double> factor) const;
  void propagate(std::span<double> wave, double dtau) const;
  /// out <- -(1/2)∇² in
  void apply(std::span<const double> in, std::span<double> out) const;
  /// <in| -(1/2)∇² |in> without the cell-volume factor.
  double expectation(std::span<const double> in) const;

 private:
  struct Plans;
  void transform_multiply(std::span<const double> in, std::span<double> out,
                          std::span<const double> factor) const;

  std::vector<int> shape_;
  std::size_t size_ = 0;
  std::size_t spectral_size_ = 0;
  std::vector<double> half_k2_;  // k²/2 on the r2c half spectrum
  std::unique_ptr<Plans> plans_;
};

/// Circular convolution with a fixed periodic kernel on a single-particle
/// grid: out(r) = Σ_s kernel(r - s) in(s). The kernel is given as a function
/// of the minimum-image displacement.
class PeriodicConvolution {
 public:
  template <class Kernel>
  PeriodicConvolution(const Grid& grid, Kernel&& kernel) : PeriodicConvolution(grid) {
    std::vector<double> k(grid.size());
    for (std::size_t f = 0; f < grid.size(); ++f) k[f] = kernel(offset(f));
    set_kernel(k);
  }
  ~PeriodicConvolution();
  PeriodicConvolution(const PeriodicConvolution&) = delete;
  PeriodicConvolution& operator=(const PeriodicConvolution&) = delete;

  void apply(std::span<const double> in, std::span<double> out) const;

 private:
  explicit PeriodicConvolution(const Grid& grid);
  Position offset(std::size_t flat) const;
  void set_kernel(const std::vector<double>& kernel);

  Grid grid_;
  std::size_t spectral_size_ = 0;
  std::vector<std::complex<double>> kernel_hat_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

}  // namespace tdqmc
