#pragma once

// Per-item bodies shared by the serial and OpenMP kernels.

#include <cmath>
#include <vector>

#include "tdqmc/kernels.hpp"
#include "tdqmc/potentials.hpp"
#include "tdqmc/propagator.hpp"

namespace tdqmc::kernels::detail {

inline double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
#pragma omp simd reduction(+ : acc)
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

inline double kernel_value(const Grid& grid, const Position& x, const Position& y, double sigma) {
  if (std::isinf(sigma)) return 1.0;
  return std::exp(-grid.distance2(x, y) / (2.0 * sigma * sigma));
}

// vee[l*G + r] = strength V_ee(node r, partner l)
inline void vee_row(const DirectRowsArgs& args, std::size_t l, double* out) {
  const Grid& g = *args.grid;
  for (std::size_t r = 0; r < g.size(); ++r)
    out[r] = args.strength * coulomb_ee_r2(g.distance2(g.node_position(r), args.partners[l]), args.a);
}

inline void direct_row(const DirectRowsArgs& args, const std::vector<double>& vee, std::size_t k,
                       double* row) {
  const std::size_t G = args.grid->size();
  const std::size_t M = args.partners.size();
  thread_local std::vector<double> w;
  w.resize(M);
  double Z = 0.0;
  for (std::size_t l = 0; l < M; ++l) {
    w[l] = kernel_value(*args.grid, args.partners[l], args.partners[k], args.sigma);
    Z += w[l];
  }
  std::fill(row, row + G, 0.0);
  for (std::size_t l = 0; l < M; ++l) {
    if (w[l] == 0.0) continue;
    const double c = w[l] / Z;
    const double* v = vee.data() + l * G;
#pragma omp simd
    for (std::size_t r = 0; r < G; ++r) row[r] += c * v[r];
  }
}

inline void mean_field_row(const DirectRowsArgs& args, const std::vector<double>& vee, double* row) {
  const std::size_t G = args.grid->size();
  const std::size_t M = args.partners.size();
  std::fill(row, row + G, 0.0);
  for (std::size_t l = 0; l < M; ++l)
    for (std::size_t r = 0; r < G; ++r) row[r] += vee[l * G + r];
  for (std::size_t r = 0; r < G; ++r) row[r] /= static_cast<double>(M);
}

inline void table_row(const GriddedTableArgs& args, std::size_t c, double* row, double& z) {
  const Grid& g = *args.grid;
  const std::size_t G = g.size();
  thread_local std::vector<double> weighted;
  weighted.resize(G);
  double sum = 0.0;
  for (std::size_t s = 0; s < G; ++s) {
    weighted[s] = args.deposit[s] == 0.0
                      ? 0.0
                      : args.kernel_offsets[offset_index(g, s, c)] * args.deposit[s];
    sum += weighted[s];
  }
  z = sum;
  args.vee->apply(weighted, std::span<double>(row, G));
}

inline void wave_step(const WaveStepArgs& args, std::size_t w) {
  const std::size_t G = args.kinetic->size();
  thread_local std::vector<double> v;
  v.resize(G);
  (*args.potential)(w, v);
  step_guide_wave(args.waves.subspan(w * G, G), v, args.dtau, *args.kinetic, args.kinetic_factor,
                  args.cell_volume);
}

inline void gram_row(std::span<const double> waves, std::size_t count, double cell_volume,
                     std::size_t k, std::span<double> out) {
  const std::size_t G = waves.size() / count;
  const double* wk = waves.data() + k * G;
  for (std::size_t l = k; l < count; ++l)
    out[k * count + l] = cell_volume * dot(wk, waves.data() + l * G, G);
}

// partial[k] = g_kk² + 2 Σ_{l>k} g_kl², diag[k] = g_kk
inline void moments_row(std::span<const double> waves, std::size_t count, double cell_volume,
                        std::size_t k, double* partial, double* diag) {
  const std::size_t G = waves.size() / count;
  const double* wk = waves.data() + k * G;
  const double gkk = cell_volume * dot(wk, wk, G);
  double off = 0.0;
  for (std::size_t l = k + 1; l < count; ++l) {
    const double g = cell_volume * dot(wk, waves.data() + l * G, G);
    off += g * g;
  }
  partial[k] = gkk * gkk + 2.0 * off;
  diag[k] = gkk;
}

inline GramMoments reduce_moments(const std::vector<double>& partial, const std::vector<double>& diag) {
  GramMoments m;
  for (std::size_t k = 0; k < partial.size(); ++k) {
    m.sum_squares += partial[k];
    m.trace += diag[k];
  }
  return m;
}

inline void mirror(std::size_t count, std::span<double> out) {
  for (std::size_t k = 0; k < count; ++k)
    for (std::size_t l = 0; l < k; ++l) out[k * count + l] = out[l * count + k];
}

}  // namespace tdqmc::kernels::detail
