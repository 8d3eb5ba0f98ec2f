#include "tdqmc/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tdqmc/errors.hpp"

namespace tdqmc {

void StepParams::validate() const {
  if (!(dtau > 0.0)) throw ConfigError("dtau must be positive");
  if (!(drift_epsilon > 0.0)) throw ConfigError("drift_epsilon must be positive");
  if (drift_cap < 0.0) throw ConfigError("drift_cap must be positive (or 0 for one spacing)");
}

void step_guide_wave(std::span<double> wave, std::span<const double> v_total, double dtau,
                     const SpectralKinetic& kinetic, std::span<const double> kinetic_factor,
                     double cell_volume) {
  const std::size_t n = wave.size();
  thread_local std::vector<double> half;
  half.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    half[i] = std::exp(-0.5 * dtau * v_total[i]);
    wave[i] *= half[i];
  }
  kinetic.propagate(wave, kinetic_factor);
  double norm2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    wave[i] *= half[i];
    norm2 += wave[i] * wave[i];
  }
  norm2 *= cell_volume;
  if (!std::isfinite(norm2) || !(norm2 > 0.0))
    throw NumericalError("guide wave lost finiteness during a step (dtau = " + std::to_string(dtau) +
                         "); reduce dtau");
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : wave) v *= inv;
}

Field step_guide_wave(const Field& wave, const Field& v_total, double dtau) {
  if (!(wave.grid() == v_total.grid()))
    throw std::invalid_argument("wave and potential live on different grids");
  const SpectralKinetic kinetic(wave.grid());
  Field out = wave;
  step_guide_wave(out.values(), v_total.values(), dtau, kinetic, kinetic.propagator_factor(dtau),
                  wave.grid().cell_volume());
  return out;
}

double rayleigh_energy(std::span<const double> wave, std::span<const double> potential,
                       const SpectralKinetic& kinetic) {
  double norm = 0.0, pot = 0.0;
  for (std::size_t i = 0; i < wave.size(); ++i) {
    norm += wave[i] * wave[i];
    pot += potential[i] * wave[i] * wave[i];
  }
  return (kinetic.expectation(wave) + pot) / norm;
}

double max_abs(std::span<const double> wave) {
  double m = 0.0;
  for (double v : wave) m = std::max(m, std::abs(v));
  return m;
}

namespace {

// Centred-difference gradient at a node.
Position node_gradient(const Grid& grid, std::span<const double> wave, std::size_t flat) {
  const int n = grid.points_per_axis();
  const double inv2h = 0.5 / grid.spacing();
  if (grid.dim() == 1) {
    const int i = static_cast<int>(flat);
    const int ip = i + 1 == n ? 0 : i + 1;
    const int im = i == 0 ? n - 1 : i - 1;
    return {(wave[ip] - wave[im]) * inv2h, 0.0};
  }
  const int ix = static_cast<int>(flat / n), iy = static_cast<int>(flat % n);
  const int xp = ix + 1 == n ? 0 : ix + 1, xm = ix == 0 ? n - 1 : ix - 1;
  const int yp = iy + 1 == n ? 0 : iy + 1, ym = iy == 0 ? n - 1 : iy - 1;
  return {(wave[grid.flat_index(xp, iy)] - wave[grid.flat_index(xm, iy)]) * inv2h,
          (wave[grid.flat_index(ix, yp)] - wave[grid.flat_index(ix, ym)]) * inv2h};
}

}  // namespace

Position drift_velocity(const Grid& grid, std::span<const double> wave, const Position& r,
                        const StepParams& params, double wave_max) {
  const Stencil s = interpolation_stencil(grid, r);
  double phi = 0.0;
  Position grad{0.0, 0.0};
  for (int c = 0; c < s.count; ++c) {
    phi += s.weight[c] * wave[s.index[c]];
    const Position g = node_gradient(grid, wave, s.index[c]);
    grad[0] += s.weight[c] * g[0];
    grad[1] += s.weight[c] * g[1];
  }
  const double cap_speed = params.cap_for(grid) / params.dtau;
  const double gnorm = std::hypot(grad[0], grad[1]);
  if (std::abs(phi) < params.drift_epsilon * wave_max) {
    if (gnorm == 0.0) return {0.0, 0.0};
    // up-hill in |φ|
    const double sign = phi < 0.0 ? -1.0 : 1.0;
    return {sign * grad[0] / gnorm * cap_speed, sign * grad[1] / gnorm * cap_speed};
  }
  Position v{grad[0] / phi, grad[1] / phi};
  const double speed = std::hypot(v[0], v[1]);
  if (speed > cap_speed) {
    v[0] *= cap_speed / speed;
    v[1] *= cap_speed / speed;
  }
  return v;
}

Position drift_velocity(const Grid& grid, std::span<const double> wave, const Position& r,
                        const StepParams& params) {
  return drift_velocity(grid, wave, r, params, max_abs(wave));
}

Position step_walker(const Grid& grid, const Position& r, std::span<const double> wave,
                     const StepParams& params, const Position& noise, double wave_max) {
  const Position v = drift_velocity(grid, wave, r, params, wave_max);
  const double diffusion = std::sqrt(params.dtau);
  Position next{r[0] + v[0] * params.dtau + noise[0] * diffusion, 0.0};
  if (grid.dim() == 2) next[1] = r[1] + v[1] * params.dtau + noise[1] * diffusion;
  return grid.wrap(next);
}

Position step_walker(const Grid& grid, const Position& r, std::span<const double> wave,
                     const StepParams& params, const Position& noise) {
  return step_walker(grid, r, wave, params, noise, max_abs(wave));
}

}  // namespace tdqmc
