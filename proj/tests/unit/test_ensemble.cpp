#include <doctest.h>

#include "tdqmc/errors.hpp"
#include "tdqmc/ensemble.hpp"
#include "tdqmc/quantum_info.hpp"

using namespace tdqmc;

namespace {
// Frozen by dense diagonalisation of the spectral Hamiltonian (independent script).
constexpr double kSingleWellEnergy = -0.36904049284257545;

LatticeSpec diatomic(double d = 4.0) {
  LatticeSpec s;
  s.sites = {{0, 0}, {1, 0}};
  s.d = d;
  return s;
}

LatticeSpec single_site() {
  LatticeSpec s;
  s.sites = {{0, 0}};
  return s;
}
}  // namespace

TEST_SUITE("ensemble") {
  TEST_CASE("initial geometry follows the sites") {
    const Grid g = make_grid(1, 18.0, 128);
    EnsembleOptions o;
    o.N = 2;
    o.M = 200;
    const TdqmcState st = init_ensemble(diatomic(), g, o);
    CHECK(st.centres[0][0] == -2.0);
    CHECK(st.centres[1][0] == 2.0);
    for (std::size_t i = 0; i < 2; ++i) {
      double mean = 0.0;
      for (const auto& p : st.electron_positions(i)) mean += p[0];
      CHECK(mean / 200 == doctest::Approx(st.centres[i][0]).epsilon(0.2).scale(1.0));
    }
    for (std::size_t k = 0; k < 5; ++k) {
      double n = 0.0;
      for (double v : st.wave(1, k)) n += v * v;
      CHECK(n * g.cell_volume() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("one electron, one walker") {
    const Grid g = make_grid(1, 18.0, 64);
    EnsembleOptions o;
    o.M = 1;
    const TdqmcState st = init_ensemble(single_site(), g, o);
    CHECK(st.waves.size() == g.size());
    CHECK(st.positions.size() == 1);
  }

  TEST_CASE("options are validated") {
    const Grid g = make_grid(1, 18.0, 64);
    EnsembleOptions o;
    o.N = 3;
    CHECK_THROWS_AS(init_ensemble(diatomic(), g, o), ConfigError);
    o.N = 1;
    o.M = 0;
    CHECK_THROWS_AS(init_ensemble(diatomic(), g, o), ConfigError);
    RelaxParams p;
    p.vee_strength = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
  }

  TEST_CASE("same seed gives bit-identical states") {
    const Grid g = make_grid(1, 18.0, 64);
    EnsembleOptions o;
    o.N = 2;
    o.M = 40;
    o.seed = 99;
    RelaxParams p;
    p.max_steps = 30;
    TdqmcState a = init_ensemble(diatomic(), g, o), b = init_ensemble(diatomic(), g, o);
    CHECK(a.waves == b.waves);
    CHECK(a.positions == b.positions);
    relax(a, diatomic(), p);
    relax(b, diatomic(), p);
    CHECK(a.waves == b.waves);
    CHECK(a.positions == b.positions);
    o.seed = 100;
    const TdqmcState c = init_ensemble(diatomic(), g, o);
    CHECK(c.positions != init_ensemble(diatomic(), g, {2, 40, 1.0, 99}).positions);
  }

  TEST_CASE("serial and parallel relaxation agree bit for bit") {
    const Grid g = make_grid(1, 18.0, 64);
    EnsembleOptions o;
    o.N = 2;
    o.M = 30;
    for (KernelRoute route : {KernelRoute::direct, KernelRoute::gridded}) {
      RelaxParams p;
      p.max_steps = 25;
      p.route = route;
      TdqmcState a = init_ensemble(diatomic(), g, o), b = a;
      p.parallel = true;
      const auto ra = relax(a, diatomic(), p);
      p.parallel = false;
      const auto rb = relax(b, diatomic(), p);
      CHECK(a.waves == b.waves);
      CHECK(a.positions == b.positions);
      CHECK(ra.final_energy == rb.final_energy);
    }
  }

  TEST_CASE("single electron relaxes to the exact well energy") {
    const Grid g = make_grid(1, 20.0, 128);
    EnsembleOptions o;
    o.M = 20;
    TdqmcState st = init_ensemble(single_site(), g, o);
    RelaxParams p;
    p.max_steps = 4000;
    p.energy_tol = 1e-9;
    const auto rep = relax(st, single_site(), p);
    CHECK(rep.converged);
    CHECK(total_energy(st, single_site()) == doctest::Approx(kSingleWellEnergy).epsilon(1e-3).scale(1.0));
    // no partner, so the Rayleigh quotient can only fall
    for (std::size_t n = 1; n < rep.energy_trace.size(); ++n)
      CHECK(rep.energy_trace[n].energy <= rep.energy_trace[n - 1].energy + 1e-12);
  }

  TEST_CASE("single electron in a harmonic trap") {
    // a broad, nearly harmonic well is not a lattice; use total_energy with a field
    const Grid g = make_grid(1, 20.0, 256);
    Field v(g);
    for (std::size_t r = 0; r < g.size(); ++r) v[r] = 0.5 * g.coordinate(static_cast<int>(r)) * g.coordinate(static_cast<int>(r));
    EnsembleOptions o;
    o.M = 4;
    TdqmcState st = init_ensemble(single_site(), g, o);
    // Gaussian with s² = 1/2 is the analytic ground state
    for (std::size_t k = 0; k < o.M; ++k) {
      auto w = st.wave(0, k);
      double n = 0.0;
      for (std::size_t r = 0; r < g.size(); ++r) {
        const double x = g.coordinate(static_cast<int>(r));
        w[r] = std::exp(-x * x / 2);
        n += w[r] * w[r];
      }
      for (double& x : w) x /= std::sqrt(n * g.cell_volume());
    }
    CHECK(total_energy(st, v, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-6));
  }

  TEST_CASE("coincident walker pairs carry exactly one unit of repulsion") {
    const Grid g = make_grid(1, 18.0, 64);
    EnsembleOptions o;
    o.N = 2;
    o.M = 17;
    TdqmcState st = init_ensemble(diatomic(), g, o);
    for (std::size_t k = 0; k < o.M; ++k) st.position(1, k) = st.position(0, k);
    const double with = total_energy(st, diatomic(), 1.0);
    const double without = total_energy(st, diatomic(), 0.0);
    CHECK(with - without == doctest::Approx(1.0).epsilon(1e-13));
  }

  TEST_CASE("mean-field waves stay identical across walkers") {
    const Grid g = make_grid(1, 18.0, 64);
    EnsembleOptions o;
    o.N = 2;
    o.M = 25;
    o.sigma = kMeanFieldSigma;
    TdqmcState st = init_ensemble(diatomic(), g, o);
    RelaxParams p;
    p.max_steps = 40;
    relax(st, diatomic(), p);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t k = 1; k < o.M; ++k) {
        const auto a = st.wave(i, 0), b = st.wave(i, k);
        CHECK(std::equal(a.begin(), a.end(), b.begin()));
      }
  }

  TEST_CASE("sigma does not matter for one electron") {
    const Grid g = make_grid(1, 20.0, 64);
    EnsembleOptions o;
    o.M = 10;
    RelaxParams p;
    p.max_steps = 200;
    const SigmaScan scan = optimize_sigma(single_site(), g, o, {0.5, 1.0, 4.0, kMeanFieldSigma}, p);
    REQUIRE(scan.curve.size() == 4);
    for (const auto& pt : scan.curve) CHECK(pt.energy == scan.curve[0].energy);
    CHECK_THROWS_AS(optimize_sigma(single_site(), g, o, {}, p), ConfigError);
  }

  TEST_CASE("diatomic density develops two maxima at the wells") {
    const Grid g = make_grid(1, 18.0, 128);
    EnsembleOptions o;
    o.N = 2;
    o.M = 200;
    TdqmcState st = init_ensemble(diatomic(), g, o);
    RelaxParams p;
    p.max_steps = 300;
    relax(st, diatomic(), p);
    const Field n = one_body_density(st);
    std::vector<double> maxima;
    for (int j = 0; j < 128; ++j)
      if (n[j] > n[(j + 1) % 128] && n[j] > n[(j + 127) % 128]) maxima.push_back(g.coordinate(j));
    REQUIRE(maxima.size() == 2);
    CHECK(maxima[0] == doctest::Approx(-2.0).epsilon(0.3).scale(1.0));
    CHECK(maxima[1] == doctest::Approx(2.0).epsilon(0.3).scale(1.0));
  }
}
