#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace tdqmc {

/// A point in 1D or 2D space. In 1D only the first component is used and the
/// second stays zero.
using Position = std::array<double, 2>;

/// Uniform, cell-centred, periodic mesh over [-extent/2, extent/2)^dim.
///
/// Node j on an axis sits at -extent/2 + j*spacing. Flat indices are row-major
/// with the x index slowest: flat = ix*n + iy.
class Grid {
 public:
  Grid() = default;
  Grid(int dim, double extent, int points_per_axis);

  int dim() const { return dim_; }
  double extent() const { return extent_; }
  int points_per_axis() const { return n_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return size_; }
  /// spacing^dim, the quadrature weight of one node.
  double cell_volume() const { return cell_volume_; }

  double coordinate(int j) const { return -0.5 * extent_ + j * spacing_; }
  Position node_position(std::size_t flat) const;
  std::size_t flat_index(int ix, int iy = 0) const {
    return dim_ == 1 ? static_cast<std::size_t>(ix)
                     : static_cast<std::size_t>(ix) * n_ + static_cast<std::size_t>(iy);
  }

  double wrap_coordinate(double x) const;
  Position wrap(Position r) const;
  /// Minimum-image displacement a - b.
  Position displacement(const Position& a, const Position& b) const;
  double distance2(const Position& a, const Position& b) const;

  bool operator==(const Grid& other) const = default;

 private:
  int dim_ = 1;
  double extent_ = 1.0;
  int n_ = 8;
  double spacing_ = 0.125;
  std::size_t size_ = 8;
  double cell_volume_ = 0.125;
};

Grid make_grid(int dim, double extent, int points_per_axis);
Position wrap_position(const Grid& grid, const Position& r);

/// Nodes and multilinear weights used to evaluate a grid function at an
/// arbitrary (wrapped) position.
struct Stencil {
  std::array<std::size_t, 4> index{};
  std::array<double, 4> weight{};
  int count = 0;
};

Stencil interpolation_stencil(const Grid& grid, const Position& r);

template <class T>
T interpolate(const Grid& grid, std::span<const T> values, const Position& r) {
  const Stencil s = interpolation_stencil(grid, r);
  T acc{};
  for (int c = 0; c < s.count; ++c) acc += s.weight[c] * values[s.index[c]];
  return acc;
}

/// Scalar values on every node of a grid.
template <class T>
class BasicField {
 public:
  BasicField() = default;
  explicit BasicField(const Grid& grid, T fill = T{}) : grid_(grid), values_(grid.size(), fill) {}
  BasicField(const Grid& grid, std::vector<T> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw std::invalid_argument("field size does not match grid point count");
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }
  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

  /// Sum |v|^2 * cell_volume.
  double norm2() const {
    double acc = 0.0;
    for (const T& v : values_) acc += std::norm(v);
    return acc * grid_.cell_volume();
  }
  void normalize() {
    const double n = std::sqrt(norm2());
    if (!(n > 0.0)) throw std::domain_error("cannot normalize a zero field");
    for (T& v : values_) v /= n;
  }

 private:
  Grid grid_;
  std::vector<T> values_;
};

using Field = BasicField<double>;
using ComplexField = BasicField<std::complex<double>>;

template <class T>
T interpolate(const BasicField<T>& field, const Position& r) {
  return interpolate<T>(field.grid(), field.values(), r);
}

}  // namespace tdqmc
