#include <doctest.h>

#include <random>

#include "tdqmc/errors.hpp"
#include "tdqmc/kernels.hpp"
#include "tdqmc/nonlocal_kernel.hpp"
#include "tdqmc/potentials.hpp"

using namespace tdqmc;

namespace {
std::vector<Position> random_positions(const Grid& g, std::size_t n, std::uint64_t seed,
                                       double spread) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, spread);
  std::vector<Position> out(n);
  for (auto& p : out) p = g.wrap({nd(rng), g.dim() == 2 ? nd(rng) : 0.0});
  return out;
}

double max_abs_diff(const std::vector<double>& a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}
}  // namespace

TEST_SUITE("nonlocal_kernel") {
  TEST_CASE("gaussian_kernel examples") {
    const Grid g = make_grid(1, 20.0, 64);
    CHECK(gaussian_kernel(g, {1.3, 0}, {1.3, 0}, 0.7) == 1.0);
    CHECK(gaussian_kernel(g, {0.0, 0}, {0.8, 0}, 0.8) == doctest::Approx(0.60653065971263342).epsilon(1e-14));
    CHECK(gaussian_kernel(g, {-9, 0}, {9, 0}, kMeanFieldSigma) == 1.0);
    // minimum image: -9.5 and 9.5 are 1 apart
    CHECK(gaussian_kernel(g, {-9.5, 0}, {9.5, 0}, 1.0) == doctest::Approx(std::exp(-0.5)));
  }

  TEST_CASE("kernel values stay in (0, 1]") {
    const Grid g = make_grid(2, 10.0, 16);
    const auto pts = random_positions(g, 200, 1, 3.0);
    for (double s : {0.1, 0.5, 2.0, 50.0})
      for (std::size_t k = 1; k < pts.size(); ++k) {
        const double v = gaussian_kernel(g, pts[k], pts[k - 1], s);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
  }

  TEST_CASE("kernel_weights examples") {
    const Grid g = make_grid(1, 10.0, 32);
    std::vector<Position> same(7, Position{0.4, 0});
    CHECK(kernel_weights(g, same, {0.4, 0}, 0.3).Z == 7.0);
    std::vector<Position> one{{2.0, 0}};
    CHECK(kernel_weights(g, one, {2.0, 0}, 0.3).Z == 1.0);
    const auto pts = random_positions(g, 50, 2, 2.0);
    const KernelWeights w = kernel_weights(g, pts, pts[3], kMeanFieldSigma);
    CHECK(w.Z == 50.0);
    for (double x : w.weights) CHECK(x == 1.0);
    // Z is bounded by M and at least the self term
    const KernelWeights w2 = kernel_weights(g, pts, pts[3], 0.5);
    CHECK(w2.Z >= 1.0);
    CHECK(w2.Z <= 50.0);
  }

  TEST_CASE("validate_sigma") {
    CHECK_NOTHROW(validate_sigma({0.5, kMeanFieldSigma}));
    CHECK_THROWS_AS(validate_sigma({0.0}), ConfigError);
    CHECK_THROWS_AS(validate_sigma({-1.0}), ConfigError);
    CHECK_THROWS_AS(validate_sigma({std::nan("")}), ConfigError);
  }

  TEST_CASE("effective_potential examples") {
    const Grid g = make_grid(1, 12.0, 48);
    std::vector<Position> lone{{0.7, 0}};
    const Field zero = effective_potential(0, 0, {1, 1, lone}, {1.0}, g, 1.0);
    for (std::size_t r = 0; r < g.size(); ++r) CHECK(zero[r] == 0.0);

    std::vector<Position> pair{{-1.0, 0}, {2.5, 0}};
    const Field f = effective_potential(0, 0, {2, 1, pair}, {1.0, 1.0}, g, 1.0);
    for (std::size_t r = 0; r < g.size(); ++r)
      CHECK(f[r] == doctest::Approx(coulomb_ee(g, g.node_position(r), pair[1], 1.0)).epsilon(1e-14));
  }

  TEST_CASE("mean-field potential is the unweighted average and k-independent") {
    const Grid g = make_grid(1, 12.0, 48);
    const std::size_t M = 9;
    auto pts = random_positions(g, 2 * M, 3, 2.0);
    const WalkerSnapshot snap{2, M, pts};
    const SigmaParams s{kMeanFieldSigma, kMeanFieldSigma};
    const Field f0 = effective_potential(0, 0, snap, s, g, 1.0);
    for (std::size_t k = 1; k < M; ++k) {
      const Field fk = effective_potential(0, k, snap, s, g, 1.0);
      for (std::size_t r = 0; r < g.size(); ++r) CHECK(fk[r] == f0[r]);
    }
    for (std::size_t r = 0; r < g.size(); r += 7) {
      double avg = 0.0;
      for (std::size_t l = 0; l < M; ++l) avg += coulomb_ee(g, g.node_position(r), snap.at(1, l), 1.0);
      CHECK(f0[r] == doctest::Approx(avg / M).epsilon(1e-13));
    }
  }

  TEST_CASE("small sigma approaches the partner walker's own repulsion") {
    const Grid g = make_grid(1, 12.0, 48);
    auto pts = random_positions(g, 20, 4, 3.0);
    const WalkerSnapshot snap{2, 10, pts};
    const Field f = effective_potential(0, 4, snap, {1e-3, 1e-3}, g, 1.0);
    for (std::size_t r = 0; r < g.size(); ++r)
      CHECK(f[r] == doctest::Approx(coulomb_ee(g, g.node_position(r), snap.at(1, 4), 1.0)).epsilon(1e-12));
  }

  TEST_CASE("builder direct route equals the reference") {
    for (int dim : {1, 2}) {
      const Grid g = make_grid(dim, 10.0, dim == 1 ? 40 : 12);
      const std::size_t N = 3, M = 6;
      auto pts = random_positions(g, N * M, 5, 2.0);
      const WalkerSnapshot snap{N, M, pts};
      const SigmaParams s{0.8, kMeanFieldSigma, 1.7};
      EffectivePotentialBuilder b(g, 1.0, 0.75, KernelRoute::direct);
      b.build(snap, s);
      for (std::size_t i = 0; i < N; ++i)
        for (std::size_t k = 0; k < M; ++k) {
          std::vector<double> out(g.size(), 0.0);
          b.accumulate(i, k, out);
          const Field ref = effective_potential(i, k, snap, s, g, 1.0, 0.75);
          CHECK(max_abs_diff(out, ref.values()) < 1e-13);
        }
    }
  }

  TEST_CASE("gridded route approximates the direct sum") {
    const Grid g = make_grid(1, 18.0, 128);
    const std::size_t N = 2, M = 400;
    auto pts = random_positions(g, N * M, 6, 2.0);
    const WalkerSnapshot snap{N, M, pts};
    for (double sigma : {0.5, 1.0, kMeanFieldSigma}) {
      const SigmaParams s{sigma, sigma};
      EffectivePotentialBuilder direct(g, 1.0, 1.0, KernelRoute::direct);
      EffectivePotentialBuilder gridded(g, 1.0, 1.0, KernelRoute::gridded);
      direct.build(snap, s);
      gridded.build(snap, s);
      double worst = 0.0;
      for (std::size_t k = 0; k < M; k += 13) {
        std::vector<double> a(g.size(), 0.0), b(g.size(), 0.0);
        direct.accumulate(0, k, a);
        gridded.accumulate(0, k, b);
        worst = std::max(worst, max_abs_diff(a, b));
      }
      // potentials are O(0.5); deposit and interpolation errors are O(h²)
      CHECK(worst < 5e-3);
    }
  }

  TEST_CASE("serial and parallel kernels are bit-identical") {
    const Grid g = make_grid(2, 10.0, 16);
    const std::size_t M = 37;
    auto pts = random_positions(g, M, 7, 2.0);
    kernels::DirectRowsArgs args{&g, pts, 0.9, 1.0, 1.0};
    std::vector<double> a(M * g.size()), b(M * g.size());
    kernels::serial::direct_rows(args, a);
    kernels::parallel::direct_rows(args, b);
    CHECK(a == b);

    std::mt19937_64 rng(8);
    std::normal_distribution<double> nd;
    std::vector<double> waves(M * g.size());
    for (auto& v : waves) v = nd(rng);
    std::vector<double> ga(M * M), gb(M * M);
    kernels::serial::gram(waves, M, g.cell_volume(), ga);
    kernels::parallel::gram(waves, M, g.cell_volume(), gb);
    CHECK(ga == gb);
    const auto ma = kernels::serial::gram_moments(waves, M, g.cell_volume());
    const auto mb = kernels::parallel::gram_moments(waves, M, g.cell_volume());
    CHECK(ma.trace == mb.trace);
    CHECK(ma.sum_squares == mb.sum_squares);
  }

  TEST_CASE("cloud-in-cell deposit conserves the walker count") {
    const Grid g = make_grid(2, 10.0, 16);
    auto pts = random_positions(g, 101, 9, 4.0);
    const auto h = kernels::deposit(g, pts);
    double sum = 0.0;
    for (double v : h) sum += v;
    CHECK(sum == doctest::Approx(101.0).epsilon(1e-12));
  }
}
