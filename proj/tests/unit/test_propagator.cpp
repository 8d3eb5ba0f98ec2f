#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include "tdqmc/errors.hpp"
#include "tdqmc/oracle.hpp"
#include "tdqmc/propagator.hpp"
#include "tdqmc/potentials.hpp"

using namespace tdqmc;

namespace {
Field harmonic(const Grid& g) {
  Field v(g);
  for (std::size_t r = 0; r < g.size(); ++r) {
    const Position p = g.node_position(r);
    v[r] = 0.5 * (p[0] * p[0] + p[1] * p[1]);
  }
  return v;
}

Field gaussian(const Grid& g, double s, double centre = 0.0) {
  Field f(g);
  for (std::size_t r = 0; r < g.size(); ++r) {
    const double x = g.node_position(r)[0] - centre;
    f[r] = std::exp(-x * x / (4 * s * s));
  }
  f.normalize();
  return f;
}

double energy(const Field& wave, const Field& v) {
  SpectralKinetic kin(wave.grid());
  return rayleigh_energy(wave.values(), v.values(), kin);
}
}  // namespace

TEST_SUITE("propagator") {
  TEST_CASE("a Fourier mode is a kinetic eigenfunction") {
    const Grid g = make_grid(1, 10.0, 64);
    Field f(g), zero(g);
    const double k = 2 * std::numbers::pi * 3 / 10.0;
    for (std::size_t r = 0; r < g.size(); ++r) f[r] = std::cos(k * g.coordinate(static_cast<int>(r)));
    f.normalize();
    SpectralKinetic kin(g);
    std::vector<double> raw(f.values().begin(), f.values().end());
    kin.propagate(raw, 0.1);
    for (std::size_t r = 0; r < g.size(); ++r)
      CHECK(raw[r] == doctest::Approx(std::exp(-k * k * 0.1 / 2) * f[r]).epsilon(1e-12).scale(1.0));
    const Field g2 = step_guide_wave(f, zero, 0.1);
    for (std::size_t r = 0; r < g.size(); ++r) CHECK(std::abs(g2[r] - f[r]) < 1e-12);
    CHECK(energy(f, zero) == doctest::Approx(k * k / 2).epsilon(1e-12));
  }

  TEST_CASE("step preserves the norm") {
    const Grid g = make_grid(2, 8.0, 16);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Field f(g), v(g);
    for (std::size_t r = 0; r < g.size(); ++r) {
      f[r] = u(rng);
      v[r] = 3.0 * u(rng) - 1.5;
    }
    for (int n = 0; n < 10; ++n) {
      f = step_guide_wave(f, v, 0.05);
      CHECK(f.norm2() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("the exact ground state is a fixed point") {
    LatticeSpec s;
    s.sites = {{0, 0}};
    const Grid g = make_grid(1, 20.0, 128);
    const Field v = sample_on_grid(s, g);
    const GroundState1p gs = exact_ground_state_1p(v);
    Field f = gs.wave;
    for (int n = 0; n < 100; ++n) f = step_guide_wave(f, v, 0.01);
    double sign = f[64] * gs.wave[64] > 0 ? 1.0 : -1.0;
    double worst = 0.0;
    for (std::size_t r = 0; r < g.size(); ++r) worst = std::max(worst, std::abs(sign * f[r] - gs.wave[r]));
    // Strang splitting error O(dtau²) in the stationary state
    CHECK(worst < 1e-4);
    CHECK(energy(f, v) == doctest::Approx(gs.energy).epsilon(1e-6));
  }

  TEST_CASE("harmonic relaxation reaches 0.5 with monotone energy") {
    const Grid g = make_grid(1, 20.0, 256);
    const Field v = harmonic(g);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Field f(g);
    for (std::size_t r = 0; r < g.size(); ++r) f[r] = u(rng);
    f.normalize();
    double prev = energy(f, v);
    for (int n = 0; n < 3000; ++n) {
      f = step_guide_wave(f, v, 0.01);
      if (n % 50 == 0) {
        const double e = energy(f, v);
        CHECK(e <= prev + 1e-12);
        prev = e;
      }
    }
    CHECK(energy(f, v) == doctest::Approx(0.5).epsilon(1e-3));
  }

  TEST_CASE("non-finite potential raises NumericalError") {
    const Grid g = make_grid(1, 10.0, 16);
    Field f = gaussian(g, 1.0);
    Field v(g);
    v[3] = std::nan("");
    CHECK_THROWS_AS(step_guide_wave(f, v, 0.01), NumericalError);
  }

  TEST_CASE("drift examples") {
    const Grid g = make_grid(1, 20.0, 512);
    StepParams p;
    p.drift_cap = 100.0;
    const double s = 1.0;
    const Field f = gaussian(g, s);
    for (double x : {-1.5, -0.3, 0.0, 0.8, 2.0}) {
      const Position v = drift_velocity(g, f.values(), {x, 0}, p);
      CHECK(v[0] == doctest::Approx(-x / (2 * s * s)).epsilon(2e-3).scale(1.0));
    }
    Field flat(g, 0.3);
    for (double x : {-3.0, 0.1, 7.7}) CHECK(drift_velocity(g, flat.values(), {x, 0}, p)[0] == 0.0);
  }

  TEST_CASE("drift cap engages near a node") {
    const Grid g = make_grid(1, 20.0, 128);
    StepParams p;
    p.dtau = 0.01;
    const Field f = gaussian(g, 0.5);  // |φ| ~ e^{-81} at x = 9
    const Position v = drift_velocity(g, f.values(), {9.0, 0}, p);
    CHECK(std::abs(v[0] * p.dtau) == doctest::Approx(p.cap_for(g)).epsilon(1e-14));
    CHECK(v[0] < 0.0);  // up-hill towards the centre
    // far from nodes a large drift is clamped to the same length
    p.drift_cap = 1e-4;
    const Position w = drift_velocity(g, f.values(), {1.5, 0}, p);
    CHECK(std::abs(w[0] * p.dtau) == doctest::Approx(1e-4).epsilon(1e-12));
  }

  TEST_CASE("walker step examples") {
    const Grid g = make_grid(1, 10.0, 64);
    Field flat(g, 1.0);
    StepParams p;
    CHECK(step_walker(g, {1.25, 0}, flat.values(), p, {0, 0}) == Position{1.25, 0});
    const Position w = step_walker(g, {4.9, 0}, flat.values(), p, {3.0, 0});
    CHECK(w[0] == doctest::Approx(-4.8));
  }

  TEST_CASE("walkers sample |φ|² of the harmonic ground state") {
    const Grid g = make_grid(1, 20.0, 256);
    const Field v = harmonic(g);
    const Field phi = exact_ground_state_1p(v).wave;
    const double peak = max_abs(phi.values());
    StepParams p;
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    const std::size_t M = 10000;
    std::vector<Position> w(M, Position{2.0, 0});  // deliberately off-centre start
    for (int n = 0; n < 800; ++n)
      for (auto& r : w) r = step_walker(g, r, phi.values(), p, {nd(rng), 0.0}, peak);
    double m = 0.0, m2 = 0.0;
    for (const auto& r : w) {
      m += r[0];
      m2 += r[0] * r[0];
    }
    m /= M;
    const double var = m2 / M - m * m;
    CHECK(var == doctest::Approx(0.5).epsilon(0.05));

    // two-sample energy-distance permutation test against direct |φ|² draws
    std::vector<double> ref(M);
    std::vector<double> wts(g.size());
    for (std::size_t r = 0; r < g.size(); ++r) wts[r] = phi[r] * phi[r];
    std::discrete_distribution<std::size_t> pick(wts.begin(), wts.end());
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    for (auto& x : ref) x = g.coordinate(static_cast<int>(pick(rng))) + jitter(rng) * g.spacing();
    std::vector<double> xs(M);
    for (std::size_t k = 0; k < M; ++k) xs[k] = w[k][0];
    // Energy distance through sorted samples: 2E|X-Y| - E|X-X'| - E|Y-Y'|
    auto mean_abs_within = [](std::vector<double> a) {
      std::sort(a.begin(), a.end());
      const double n = static_cast<double>(a.size());
      double acc = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * (2.0 * i - n + 1.0);
      return 2.0 * acc / (n * n);
    };
    auto energy_distance = [&](const std::vector<double>& a, const std::vector<double>& b) {
      std::vector<double> all(a);
      all.insert(all.end(), b.begin(), b.end());
      const double n = static_cast<double>(a.size());
      // E|pooled| relation: pooled sum = within_a + within_b + 2·between
      const double pooled = mean_abs_within(all) * 4.0 * n * n;
      const double wa = mean_abs_within(a) * n * n, wb = mean_abs_within(b) * n * n;
      const double between = (pooled - wa - wb) / 2.0 / (n * n);
      return 2.0 * between - wa / (n * n) - wb / (n * n);
    };
    const double observed = energy_distance(xs, ref);
    std::vector<double> all(xs);
    all.insert(all.end(), ref.begin(), ref.end());
    int exceed = 0;
    const int perms = 99;
    for (int t = 0; t < perms; ++t) {
      std::shuffle(all.begin(), all.end(), rng);
      const std::vector<double> a(all.begin(), all.begin() + M), b(all.begin() + M, all.end());
      if (energy_distance(a, b) >= observed) ++exceed;
    }
    const double p_value = (exceed + 1.0) / (perms + 1.0);
    CHECK(p_value > 0.01);
  }

  TEST_CASE("step parameter validation") {
    StepParams p;
    p.dtau = -0.01;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.drift_epsilon = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
  }
}
