#pragma once

#include <vector>

#include "tdqmc/grid.hpp"

namespace tdqmc {

/// Integer lattice coordinate (n) in 1D or (n, m) in 2D.
struct Site {
  int n = 0;
  int m = 0;
  auto operator<=>(const Site&) const = default;
};

/// Soft-core, screened lattice. Defaults are a = 1, V0 = -1, lambda = 1.11
/// in atomic units; d has no canonical value.
struct LatticeSpec {
  int dim = 1;
  std::vector<Site> sites;
  std::vector<Site> vacancies;
  double d = 4.0;
  double V0 = -1.0;
  double a = 1.0;
  double lambda = 1.11;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
  std::vector<Site> effective_sites() const;
  /// Cartesian position of a site. The lattice is centred on the midpoint of
  /// the bounding box of `sites` (vacancies included).
  Position site_position(const Site& s) const;
  std::vector<Position> effective_positions() const;
};

/// Σ over non-vacant sites of V0/sqrt(|r - R|² + a²) · exp(-|r - R|/lambda),
/// with minimum-image distances on `grid`.
double lattice_potential(const LatticeSpec& spec, const Grid& grid, const Position& r);

/// Soft-core repulsion 1/sqrt(|ri - rj|² + a²) (e = 1) with minimum image.
double coulomb_ee(const Grid& grid, const Position& ri, const Position& rj, double a);

inline double coulomb_ee_r2(double r2, double a) { return 1.0 / std::sqrt(r2 + a * a); }

Field sample_on_grid(const LatticeSpec& spec, const Grid& grid);

}  // namespace tdqmc
