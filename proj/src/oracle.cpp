#include "tdqmc/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>

#include "tdqmc/errors.hpp"
#include "tdqmc/propagator.hpp"
#include "tdqmc/spectral.hpp"

namespace tdqmc {

namespace {

void fix_sign(std::span<double> wave) {
  double sum = 0.0;
  for (double v : wave) sum += v;
  if (sum < 0.0)
    for (double& v : wave) v = -v;
}

// Imaginary-time relaxation on any rank; returns the final Rayleigh energy.
double relax_to_ground(std::span<double> wave, std::span<const double> v, const SpectralKinetic& kin,
                       double cell_volume, const OracleParams& params,
                       const std::function<void(std::span<double>)>& project, std::size_t& steps) {
  double energy = rayleigh_energy(wave, v, kin);
  for (double dtau : params.dtau_schedule) {
    const std::vector<double> factor = kin.propagator_factor(dtau);
    bool settled = false;
    for (std::size_t n = 1; n <= params.max_steps_per_stage; ++n) {
      step_guide_wave(wave, v, dtau, kin, factor, cell_volume);
      ++steps;
      if (n % params.check_every != 0) continue;
      if (project) project(wave);
      const double e = rayleigh_energy(wave, v, kin);
      const bool done = std::abs(e - energy) < params.energy_tol * std::max(1.0, std::abs(e));
      energy = e;
      if (done) {
        settled = true;
        break;
      }
    }
    if (!settled)
      throw NumericalError("oracle relaxation did not settle within " +
                           std::to_string(params.max_steps_per_stage) + " steps at dtau " +
                           std::to_string(dtau));
  }
  return energy;
}

}  // namespace

GroundState1p exact_ground_state_1p(const Field& potential, std::size_t dense_limit) {
  const Grid& grid = potential.grid();
  const SpectralKinetic kin(grid);
  const std::size_t G = grid.size();
  GroundState1p out{Field(grid), 0.0};
  if (G <= dense_limit) {
    Eigen::MatrixXd H(G, G);
    std::vector<double> unit(G, 0.0), col(G);
    for (std::size_t c = 0; c < G; ++c) {
      unit[c] = 1.0;
      kin.apply(unit, col);
      unit[c] = 0.0;
      for (std::size_t r = 0; r < G; ++r) H(r, c) = col[r];
      H(c, c) += potential[c];
    }
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) throw NumericalError("1p eigensolve failed");
    out.energy = es.eigenvalues()(0);
    for (std::size_t r = 0; r < G; ++r) out.wave[r] = es.eigenvectors()(r, 0);
  } else {
    for (std::size_t r = 0; r < G; ++r) out.wave[r] = 1.0;
    std::size_t steps = 0;
    OracleParams p;
    out.energy = relax_to_ground(out.wave.values(), potential.values(), kin, grid.cell_volume(), p,
                                 {}, steps);
  }
  out.wave.normalize();
  fix_sign(out.wave.values());
  return out;
}

void OracleParams::validate() const {
  if (dtau_schedule.empty()) throw ConfigError("oracle dtau schedule is empty");
  for (double d : dtau_schedule)
    if (!(d > 0.0)) throw ConfigError("oracle dtau must be positive");
  if (!(energy_tol > 0.0)) throw ConfigError("oracle energy_tol must be positive");
  if (check_every < 1) throw ConfigError("oracle check_every must be at least 1");
}

double ConfigSpaceWave::exchange_asymmetry() const {
  const std::size_t G = grid.size();
  double acc = 0.0;
  for (std::size_t a = 0; a < G; ++a)
    for (std::size_t b = 0; b < G; ++b) {
      const double d = values[a * G + b] - values[b * G + a];
      acc += d * d;
    }
  return std::sqrt(acc * grid.cell_volume() * grid.cell_volume());
}

ConfigSpaceWave exact_ground_state_2p(const LatticeSpec& spec, const Grid& grid,
                                      const OracleParams& params) {
  params.validate();
  spec.validate();
  const std::size_t G = grid.size();
  if (G * G > params.budget)
    throw ConfigError("configuration space of " + std::to_string(G * G) +
                      " points exceeds the oracle budget of " + std::to_string(params.budget));
  const Field v_en = sample_on_grid(spec, grid);

  std::vector<double> v(G * G);
  for (std::size_t a = 0; a < G; ++a) {
    const Position ra = grid.node_position(a);
    for (std::size_t b = 0; b < G; ++b)
      v[a * G + b] = v_en[a] + v_en[b] +
                     params.vee_strength * coulomb_ee(grid, ra, grid.node_position(b), spec.a);
  }

  // start from the product of one-body ground states, already exchange-symmetric
  const GroundState1p g = exact_ground_state_1p(v_en);
  ConfigSpaceWave psi{grid, std::vector<double>(G * G), 0.0, 0};
  for (std::size_t a = 0; a < G; ++a)
    for (std::size_t b = 0; b < G; ++b) psi.values[a * G + b] = g.wave[a] * g.wave[b];

  const SpectralKinetic kin(grid, 2);
  const double cell2 = grid.cell_volume() * grid.cell_volume();
  auto symmetrise = [G](std::span<double> w) {
    for (std::size_t a = 0; a < G; ++a)
      for (std::size_t b = a + 1; b < G; ++b) {
        const double m = 0.5 * (w[a * G + b] + w[b * G + a]);
        w[a * G + b] = w[b * G + a] = m;
      }
  };
  psi.energy = relax_to_ground(psi.values, v, kin, cell2, params, symmetrise, psi.steps);
  symmetrise(psi.values);
  double n2 = 0.0;
  for (double x : psi.values) n2 += x * x;
  const double inv = 1.0 / std::sqrt(n2 * cell2);
  for (double& x : psi.values) x *= inv;
  fix_sign(psi.values);
  return psi;
}

ReducedDensityMatrix exact_rdm(const ConfigSpaceWave& psi) {
  const std::size_t G = psi.grid.size();
  // rows r1, columns r2
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> P(
      psi.values.data(), static_cast<Eigen::Index>(G), static_cast<Eigen::Index>(G));
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(G, G);
  rho.selfadjointView<Eigen::Lower>().rankUpdate(P);
  rho.triangularView<Eigen::StrictlyUpper>() = rho.transpose();
  rho /= rho.trace();
  return ReducedDensityMatrix(std::move(rho), true);
}

Field exact_density(const ConfigSpaceWave& psi) {
  const std::size_t G = psi.grid.size();
  Field n(psi.grid);
  for (std::size_t a = 0; a < G; ++a) {
    double acc = 0.0;
    for (std::size_t b = 0; b < G; ++b) acc += psi(a, b) * psi(a, b);
    n[a] = acc;
  }
  double total = 0.0;
  for (double x : n.values()) total += x;
  total *= psi.grid.cell_volume();
  for (double& x : n.values()) x /= total;
  return n;
}

ConditionalEnsemble conditional_ensemble(const ConfigSpaceWave& psi, std::size_t n_samples,
                                         std::uint64_t seed) {
  if (n_samples == 0) throw ConfigError("n_samples must be positive");
  const Grid& grid = psi.grid;
  const std::size_t G = grid.size();
  std::vector<double> marginal(G, 0.0);  // particle 2
  for (std::size_t a = 0; a < G; ++a)
    for (std::size_t b = 0; b < G; ++b) marginal[b] += psi(a, b) * psi(a, b);

  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> partner(marginal.begin(), marginal.end());
  std::uniform_real_distribution<double> jitter(-0.5, 0.5);
  ConditionalEnsemble out{grid, std::vector<double>(n_samples * G), std::vector<Position>(n_samples)};
  std::vector<double> weight(G);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const std::size_t r2 = partner(rng);
    double n2 = 0.0;
    for (std::size_t a = 0; a < G; ++a) n2 += psi(a, r2) * psi(a, r2);
    const double inv = 1.0 / std::sqrt(n2 * grid.cell_volume());
    double* w = out.waves.data() + k * G;
    for (std::size_t a = 0; a < G; ++a) {
      w[a] = psi(a, r2) * inv;
      weight[a] = w[a] * w[a];
    }
    std::discrete_distribution<std::size_t> node(weight.begin(), weight.end());
    Position r = grid.node_position(node(rng));
    r[0] += jitter(rng) * grid.spacing();
    if (grid.dim() == 2) r[1] += jitter(rng) * grid.spacing();
    out.positions[k] = grid.wrap(r);
  }
  return out;
}

ZoneMaps exact_zone_maps(const ConfigSpaceWave& psi, const ZonePartition& partition,
                         std::size_t n_samples, std::uint64_t seed) {
  const ConditionalEnsemble e = conditional_ensemble(psi, n_samples, seed);
  return zone_maps(e.view(), partition);
}

namespace {

// Fraction of each node's jitter cell [x - h/2, x + h/2) inside each zone strip.
Eigen::MatrixXd cell_zone_overlap(const Grid& grid, const ZonePartition& partition) {
  const int n = grid.points_per_axis();
  const int Z = partition.zones_per_axis();
  const double h = grid.spacing(), w = partition.zone_width(), L = grid.extent();
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, Z);
  for (int j = 0; j < n; ++j) {
    const double lo = grid.coordinate(j) - 0.5 * h;
    for (int z = 0; z < Z; ++z) {
      const double zl = -0.5 * L + z * w;
      double overlap = 0.0;
      for (double shift : {-L, 0.0, L})
        overlap += std::max(0.0, std::min(lo + h, zl + w + shift) - std::max(lo, zl + shift));
      f(j, z) = overlap / h;
    }
  }
  return f;
}

}  // namespace

ZoneMaps expected_zone_maps(const ConfigSpaceWave& psi, const ZonePartition& partition,
                            std::size_t nominal_samples) {
  const Grid& grid = psi.grid;
  const std::size_t G = grid.size();
  const int n = grid.points_per_axis();
  const std::size_t NZ = partition.zone_count();
  if (partition.dim() != grid.dim() || partition.extent() != grid.extent())
    throw ConfigError("partition does not match the oracle grid");

  // column a holds Ψ(·, a): the unnormalised conditional wave for partner node a
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> psi_m(
      psi.values.data(), static_cast<Eigen::Index>(G), static_cast<Eigen::Index>(G));
  const Eigen::MatrixXd phi = psi_m;
  const Eigen::VectorXd n2 = phi.colwise().squaredNorm().transpose();

  // squared overlaps of normalised conditional waves
  Eigen::MatrixXd q = phi.transpose() * phi;
  for (Eigen::Index b = 0; b < q.cols(); ++b)
    for (Eigen::Index a = 0; a < q.rows(); ++a)
      q(a, b) = n2[a] > 0.0 && n2[b] > 0.0 ? q(a, b) * q(a, b) / (n2[a] * n2[b]) : 0.0;

  // probability that a walker at node r lands in zone z
  const Eigen::MatrixXd axis = cell_zone_overlap(grid, partition);
  Eigen::MatrixXd in_zone(G, NZ);
  for (std::size_t r = 0; r < G; ++r)
    for (std::size_t z = 0; z < NZ; ++z) {
      const auto xy = partition.zone_xy(z);
      if (grid.dim() == 1)
        in_zone(r, z) = axis(r, xy[0]);
      else if (partition.mode() == ZoneMode::cells)
        in_zone(r, z) = axis(r / n, xy[0]) * axis(r % n, xy[1]);
      else if (partition.mode() == ZoneMode::strip_x)
        in_zone(r, z) = axis(r / n, xy[0]);
      else
        in_zone(r, z) = axis(r % n, xy[1]);
    }

  // joint weight of partner node a and zone z: Σ_r |Ψ(r, a)|² P(z | r)
  const Eigen::MatrixXd sq = phi.array().square().matrix();
  const Eigen::MatrixXd w = sq.transpose() * in_zone;  // G × NZ
  const Eigen::MatrixXd qw = q * w;
  // diagonal of ρ_z on the nodes: Σ_a w_a |φ_a(r)|² h
  Eigen::MatrixXd sq_normed = sq;
  for (Eigen::Index a = 0; a < sq_normed.cols(); ++a)
    if (n2[a] > 0.0) sq_normed.col(a) /= n2[a];
  const Eigen::MatrixXd diag = sq_normed * w;

  const double total = w.sum();
  ZoneMaps out;
  out.entropy.partition = partition;
  out.entropy.kind = MapKind::local_linear_entropy;
  out.entropy.values.assign(NZ, std::numeric_limits<double>::quiet_NaN());
  out.entropy.walker_counts.assign(NZ, 0);
  out.coherence = out.entropy;
  out.coherence.kind = MapKind::local_coherence;
  for (std::size_t z = 0; z < NZ; ++z) {
    const double s = w.col(z).sum();
    if (!(s > 0.0)) continue;
    const double pur = w.col(z).dot(qw.col(z)) / (s * s);
    const double diag2 = diag.col(z).squaredNorm() / (s * s);
    const auto expected = static_cast<std::size_t>(std::llround(s / total * nominal_samples));
    out.entropy.walker_counts[z] = out.coherence.walker_counts[z] = std::max<std::size_t>(1, expected);
    out.entropy.values[z] = 1.0 - pur;
    out.coherence.values[z] = pur - diag2;
  }
  return out;
}

EntropyMap exact_local_entropy_map(const ConfigSpaceWave& psi, const ZonePartition& partition,
                                   std::size_t n_samples, std::uint64_t seed) {
  return exact_zone_maps(psi, partition, n_samples, seed).entropy;
}

HartreeResult hartree_solve(const LatticeSpec& spec, const Grid& grid, std::size_t N,
                            const HartreeParams& params) {
  spec.validate();
  const std::vector<Position> sites = spec.effective_positions();
  if (N < 1 || N > sites.size()) throw ConfigError("Hartree N must be between 1 and the site count");
  const std::size_t G = grid.size();
  const double h = grid.cell_volume();
  const Field v_en = sample_on_grid(spec, grid);
  const SpectralKinetic kin(grid);
  const std::vector<double> factor = kin.propagator_factor(params.dtau);
  const double a = spec.a;
  const double strength = params.vee_strength;
  const PeriodicConvolution vee(grid, [a, strength](const Position& d) {
    return strength * coulomb_ee_r2(d[0] * d[0] + d[1] * d[1], a);
  });

  HartreeResult out;
  const double s = params.init_width;
  for (std::size_t i = 0; i < N; ++i) {
    Field g(grid);
    for (std::size_t r = 0; r < G; ++r)
      g[r] = std::exp(-grid.distance2(grid.node_position(r), sites[i]) / (4.0 * s * s));
    g.normalize();
    out.orbitals.push_back(std::move(g));
  }

  std::vector<std::vector<double>> hartree(N, std::vector<double>(G));
  std::vector<double> dens(G), v(G), before(G);
  auto update_hartree = [&] {
    for (std::size_t j = 0; j < N; ++j) {
      for (std::size_t r = 0; r < G; ++r) dens[r] = out.orbitals[j][r] * out.orbitals[j][r] * h;
      vee.apply(dens, hartree[j]);
    }
  };
  for (std::size_t n = 1; n <= params.max_steps; ++n) {
    update_hartree();
    double change = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t r = 0; r < G; ++r) {
        v[r] = v_en[r];
        for (std::size_t j = 0; j < N; ++j)
          if (j != i) v[r] += hartree[j][r];
      }
      for (std::size_t r = 0; r < G; ++r) before[r] = out.orbitals[i][r] * out.orbitals[i][r];
      step_guide_wave(out.orbitals[i].values(), v, params.dtau, kin, factor, h);
      for (std::size_t r = 0; r < G; ++r)
        change = std::max(change, std::abs(out.orbitals[i][r] * out.orbitals[i][r] - before[r]));
    }
    out.steps = n;
    if (change < params.density_tol) {
      out.converged = true;
      break;
    }
  }

  update_hartree();
  out.density = Field(grid);
  double e = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t r = 0; r < G; ++r) out.density[r] += out.orbitals[i][r] * out.orbitals[i][r] / N;
    e += rayleigh_energy(out.orbitals[i].values(), v_en.values(), kin);
    for (std::size_t j = i + 1; j < N; ++j)
      for (std::size_t r = 0; r < G; ++r)
        e += hartree[j][r] * out.orbitals[i][r] * out.orbitals[i][r] * h;
  }
  out.energy = e;
  return out;
}

}  // namespace tdqmc
