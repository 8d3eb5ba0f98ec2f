#include "tdqmc/nonlocal_kernel.hpp"

#include <cmath>
#include <string>

#include "tdqmc/errors.hpp"
#include "tdqmc/kernels.hpp"
#include "tdqmc/potentials.hpp"

namespace tdqmc {

void validate_sigma(const SigmaParams& sigma) {
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    const double s = sigma[j];
    if (std::isnan(s) || !(s > 0.0))
      throw ConfigError("sigma[" + std::to_string(j) + "] must be positive or inf");
  }
}

double gaussian_kernel(const Grid& grid, const Position& r, const Position& rk, double sigma) {
  if (std::isinf(sigma)) return 1.0;
  return std::exp(-grid.distance2(r, rk) / (2.0 * sigma * sigma));
}

KernelWeights kernel_weights(const Grid& grid, std::span<const Position> positions_j,
                             const Position& r_jk, double sigma) {
  KernelWeights out;
  out.weights.reserve(positions_j.size());
  for (const Position& p : positions_j) {
    out.weights.push_back(gaussian_kernel(grid, p, r_jk, sigma));
    out.Z += out.weights.back();
  }
  return out;
}

Field effective_potential(std::size_t i, std::size_t k, const WalkerSnapshot& walkers,
                          const SigmaParams& sigma, const Grid& grid, double a, double strength) {
  if (sigma.size() != walkers.electrons)
    throw std::invalid_argument("one sigma per electron is required");
  Field out(grid);
  for (std::size_t j = 0; j < walkers.electrons; ++j) {
    if (j == i) continue;
    const auto partners = walkers.electron(j);
    const KernelWeights w = kernel_weights(grid, partners, partners[k], sigma[j]);
    for (std::size_t r = 0; r < grid.size(); ++r) {
      const Position node = grid.node_position(r);
      double acc = 0.0;
      for (std::size_t l = 0; l < partners.size(); ++l)
        acc += w.weights[l] * coulomb_ee(grid, node, partners[l], a);
      out[r] += strength * acc / w.Z;
    }
  }
  return out;
}

EffectivePotentialBuilder::EffectivePotentialBuilder(const Grid& grid, double a, double strength,
                                                     KernelRoute route)
    : grid_(grid), a_(a), strength_(strength), route_(route) {
  if (!(a > 0.0)) throw ConfigError("soft-core parameter a must be positive");
  if (route_ == KernelRoute::gridded) {
    vee_ = std::make_unique<PeriodicConvolution>(grid_, [a, strength](const Position& d) {
      return strength * coulomb_ee_r2(d[0] * d[0] + d[1] * d[1], a);
    });
  }
}

EffectivePotentialBuilder::~EffectivePotentialBuilder() = default;

void EffectivePotentialBuilder::build(const WalkerSnapshot& walkers, const SigmaParams& sigma,
                                      bool parallel) {
  if (sigma.size() != walkers.electrons)
    throw std::invalid_argument("one sigma per electron is required");
  snapshot_storage_.assign(walkers.positions.begin(), walkers.positions.end());
  snapshot_ = {walkers.electrons, walkers.walkers, snapshot_storage_};
  partners_.assign(walkers.electrons, {});
  if (strength_ == 0.0 || walkers.electrons < 2) return;

  const std::size_t G = grid_.size();
  const std::size_t M = walkers.walkers;
  for (std::size_t j = 0; j < walkers.electrons; ++j) {
    Partner& p = partners_[j];
    p.mean_field = std::isinf(sigma[j]);
    if (p.mean_field || route_ == KernelRoute::direct) {
      kernels::DirectRowsArgs args{&grid_, snapshot_.electron(j), sigma[j], a_, strength_};
      p.rows.assign((p.mean_field ? 1 : M) * G, 0.0);
      if (parallel)
        kernels::parallel::direct_rows(args, p.rows);
      else
        kernels::serial::direct_rows(args, p.rows);
      continue;
    }
    const auto partners = snapshot_.electron(j);
    const std::vector<double> h = kernels::deposit(grid_, partners);
    const std::vector<double> koff = kernels::kernel_offsets(grid_, sigma[j]);
    std::vector<unsigned char> needed(G, 0);
    for (const Position& r : partners) {
      const Stencil s = interpolation_stencil(grid_, r);
      for (int c = 0; c < s.count; ++c) needed[s.index[c]] = 1;
    }
    p.rows.assign(G * G, 0.0);
    p.z.assign(G, 0.0);
    kernels::GriddedTableArgs args{&grid_, vee_.get(), h, koff, needed};
    if (parallel)
      kernels::parallel::gridded_table(args, p.rows, p.z);
    else
      kernels::serial::gridded_table(args, p.rows, p.z);
  }
}

void EffectivePotentialBuilder::accumulate(std::size_t i, std::size_t k,
                                           std::span<double> out) const {
  const std::size_t G = grid_.size();
  for (std::size_t j = 0; j < partners_.size(); ++j) {
    if (j == i) continue;
    const Partner& p = partners_[j];
    if (p.rows.empty()) continue;
    if (p.mean_field || route_ == KernelRoute::direct) {
      const double* row = p.rows.data() + (p.mean_field ? 0 : k) * G;
      for (std::size_t r = 0; r < G; ++r) out[r] += row[r];
      continue;
    }
    const Stencil s = interpolation_stencil(grid_, snapshot_.at(j, k));
    double z = 0.0;
    for (int c = 0; c < s.count; ++c) z += s.weight[c] * p.z[s.index[c]];
    for (int c = 0; c < s.count; ++c) {
      const double w = s.weight[c] / z;
      if (w == 0.0) continue;
      const double* row = p.rows.data() + s.index[c] * G;
      for (std::size_t r = 0; r < G; ++r) out[r] += w * row[r];
    }
  }
}

}  // namespace tdqmc
