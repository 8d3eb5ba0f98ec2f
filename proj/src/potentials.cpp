#include "tdqmc/potentials.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tdqmc {

void LatticeSpec::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("lattice dim must be 1 or 2");
  if (!(d > 0.0)) throw std::invalid_argument("lattice constant d must be positive");
  if (!(a > 0.0)) throw std::invalid_argument("soft-core parameter a must be positive");
  if (!(lambda > 0.0)) throw std::invalid_argument("screening length lambda must be positive");
  if (sites.empty()) throw std::invalid_argument("lattice has no sites");
  for (const Site& v : vacancies) {
    if (std::find(sites.begin(), sites.end(), v) == sites.end())
      throw std::invalid_argument("vacancy (" + std::to_string(v.n) + "," + std::to_string(v.m) +
                                  ") is not a lattice site");
  }
  if (dim == 1) {
    for (const Site& s : sites)
      if (s.m != 0) throw std::invalid_argument("1D lattice sites must have m = 0");
  }
  if (effective_sites().empty()) throw std::invalid_argument("every lattice site is vacant");
}

std::vector<Site> LatticeSpec::effective_sites() const {
  std::vector<Site> out;
  for (const Site& s : sites) {
    if (std::find(vacancies.begin(), vacancies.end(), s) == vacancies.end() &&
        std::find(out.begin(), out.end(), s) == out.end())
      out.push_back(s);
  }
  return out;
}

Position LatticeSpec::site_position(const Site& s) const {
  int nlo = sites.front().n, nhi = nlo, mlo = sites.front().m, mhi = mlo;
  for (const Site& t : sites) {
    nlo = std::min(nlo, t.n);
    nhi = std::max(nhi, t.n);
    mlo = std::min(mlo, t.m);
    mhi = std::max(mhi, t.m);
  }
  const double cn = 0.5 * (nlo + nhi);
  const double cm = 0.5 * (mlo + mhi);
  return {(s.n - cn) * d, dim == 2 ? (s.m - cm) * d : 0.0};
}

std::vector<Position> LatticeSpec::effective_positions() const {
  std::vector<Position> out;
  for (const Site& s : effective_sites()) out.push_back(site_position(s));
  return out;
}

namespace {
double site_term(const LatticeSpec& spec, double r2) {
  return spec.V0 / std::sqrt(r2 + spec.a * spec.a) * std::exp(-std::sqrt(r2) / spec.lambda);
}
}  // namespace

double lattice_potential(const LatticeSpec& spec, const Grid& grid, const Position& r) {
  double v = 0.0;
  for (const Position& c : spec.effective_positions()) v += site_term(spec, grid.distance2(r, c));
  return v;
}

double coulomb_ee(const Grid& grid, const Position& ri, const Position& rj, double a) {
  return coulomb_ee_r2(grid.distance2(ri, rj), a);
}

Field sample_on_grid(const LatticeSpec& spec, const Grid& grid) {
  if (spec.dim != grid.dim())
    throw std::invalid_argument("lattice dimension does not match grid dimension");
  const std::vector<Position> centres = spec.effective_positions();
  Field f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Position r = grid.node_position(i);
    double v = 0.0;
    for (const Position& c : centres) v += site_term(spec, grid.distance2(r, c));
    f[i] = v;
  }
  return f;
}

}  // namespace tdqmc
