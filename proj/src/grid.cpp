#include "tdqmc/grid.hpp"

#include <cmath>

namespace tdqmc {

Grid::Grid(int dim, double extent, int points_per_axis)
    : dim_(dim), extent_(extent), n_(points_per_axis) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid dimension must be 1 or 2");
  if (!(extent > 0.0) || !std::isfinite(extent))
    throw std::invalid_argument("grid extent must be positive");
  if (points_per_axis < 8)
    throw std::invalid_argument("grid needs at least 8 points per axis");
  spacing_ = extent / points_per_axis;
  size_ = dim == 1 ? static_cast<std::size_t>(n_)
                   : static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  cell_volume_ = dim == 1 ? spacing_ : spacing_ * spacing_;
}

Position Grid::node_position(std::size_t flat) const {
  if (dim_ == 1) return {coordinate(static_cast<int>(flat)), 0.0};
  const auto ix = static_cast<int>(flat / n_);
  const auto iy = static_cast<int>(flat % n_);
  return {coordinate(ix), coordinate(iy)};
}

double Grid::wrap_coordinate(double x) const {
  const double half = 0.5 * extent_;
  double w = std::fmod(x + half, extent_);
  if (w < 0.0) w += extent_;
  // fmod can return extent itself after the correction above for tiny negatives
  if (w >= extent_) w -= extent_;
  return w - half;
}

Position Grid::wrap(Position r) const {
  r[0] = wrap_coordinate(r[0]);
  r[1] = dim_ == 2 ? wrap_coordinate(r[1]) : 0.0;
  return r;
}

Position Grid::displacement(const Position& a, const Position& b) const {
  Position d{a[0] - b[0], dim_ == 2 ? a[1] - b[1] : 0.0};
  for (int c = 0; c < dim_; ++c) d[c] -= extent_ * std::nearbyint(d[c] / extent_);
  return d;
}

double Grid::distance2(const Position& a, const Position& b) const {
  const Position d = displacement(a, b);
  return d[0] * d[0] + d[1] * d[1];
}

Grid make_grid(int dim, double extent, int points_per_axis) {
  return Grid(dim, extent, points_per_axis);
}

Position wrap_position(const Grid& grid, const Position& r) { return grid.wrap(r); }

Stencil interpolation_stencil(const Grid& grid, const Position& r) {
  Stencil s;
  const int n = grid.points_per_axis();
  std::array<int, 2> lo{};
  std::array<double, 2> frac{};
  for (int c = 0; c < grid.dim(); ++c) {
    double u = (grid.wrap_coordinate(r[c]) + 0.5 * grid.extent()) / grid.spacing();
    // snap so that node coordinates reproduce stored values exactly
    if (const double k = std::nearbyint(u); std::abs(u - k) < 1e-10) u = k;
    double f = std::floor(u);
    int i = static_cast<int>(f);
    frac[c] = u - f;
    if (i >= n) i -= n;  // u can round up to exactly n
    lo[c] = i;
  }
  if (grid.dim() == 1) {
    const int hi = lo[0] + 1 == n ? 0 : lo[0] + 1;
    s.count = 2;
    s.index = {static_cast<std::size_t>(lo[0]), static_cast<std::size_t>(hi), 0, 0};
    s.weight = {1.0 - frac[0], frac[0], 0.0, 0.0};
    return s;
  }
  const int hx = lo[0] + 1 == n ? 0 : lo[0] + 1;
  const int hy = lo[1] + 1 == n ? 0 : lo[1] + 1;
  s.count = 4;
  s.index = {grid.flat_index(lo[0], lo[1]), grid.flat_index(lo[0], hy),
             grid.flat_index(hx, lo[1]), grid.flat_index(hx, hy)};
  const double fx = frac[0], fy = frac[1];
  s.weight = {(1 - fx) * (1 - fy), (1 - fx) * fy, fx * (1 - fy), fx * fy};
  return s;
}

}  // namespace tdqmc
