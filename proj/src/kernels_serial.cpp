#include <cmath>

#include "kernel_bodies.hpp"

namespace tdqmc::kernels {

std::vector<double> deposit(const Grid& grid, std::span<const Position> positions) {
  std::vector<double> h(grid.size(), 0.0);
  for (const Position& p : positions) {
    const Stencil s = interpolation_stencil(grid, p);
    for (int c = 0; c < s.count; ++c) h[s.index[c]] += s.weight[c];
  }
  return h;
}

std::vector<double> kernel_offsets(const Grid& grid, double sigma) {
  std::vector<double> k(grid.size());
  const Position origin = grid.node_position(0);
  for (std::size_t f = 0; f < grid.size(); ++f) {
    // node f relative to node 0 is exactly offset f
    k[f] = detail::kernel_value(grid, grid.node_position(f), origin, sigma);
  }
  return k;
}

namespace serial {

void direct_rows(const DirectRowsArgs& args, std::span<double> rows) {
  const std::size_t G = args.grid->size();
  const std::size_t M = args.partners.size();
  std::vector<double> vee(M * G);
  for (std::size_t l = 0; l < M; ++l) detail::vee_row(args, l, vee.data() + l * G);
  if (std::isinf(args.sigma)) {
    detail::mean_field_row(args, vee, rows.data());
    return;
  }
  for (std::size_t k = 0; k < M; ++k) detail::direct_row(args, vee, k, rows.data() + k * G);
}

void gridded_table(const GriddedTableArgs& args, std::span<double> table, std::span<double> z) {
  const std::size_t G = args.grid->size();
  for (std::size_t c = 0; c < G; ++c)
    if (args.needed[c]) detail::table_row(args, c, table.data() + c * G, z[c]);
}

void step_waves(const WaveStepArgs& args) {
  for (std::size_t w = 0; w < args.count; ++w) detail::wave_step(args, w);
}

void gram(std::span<const double> waves, std::size_t count, double cell_volume,
          std::span<double> out) {
  for (std::size_t k = 0; k < count; ++k) detail::gram_row(waves, count, cell_volume, k, out);
  detail::mirror(count, out);
}

GramMoments gram_moments(std::span<const double> waves, std::size_t count, double cell_volume) {
  std::vector<double> partial(count), diag(count);
  for (std::size_t k = 0; k < count; ++k)
    detail::moments_row(waves, count, cell_volume, k, partial.data(), diag.data());
  return detail::reduce_moments(partial, diag);
}

}  // namespace serial
}  // namespace tdqmc::kernels
