#pragma once

#include <span>

#include "tdqmc/grid.hpp"
#include "tdqmc/spectral.hpp"

namespace tdqmc {

/// Imaginary-time step controls. A non-positive drift_cap means "one grid
/// spacing"; drift_epsilon is relative to max|φ| of the guiding wave.
struct StepParams {
  double dtau = 0.01;
  double drift_epsilon = 1e-8;
  double drift_cap = 0.0;

  void validate() const;
  double cap_for(const Grid& grid) const { return drift_cap > 0.0 ? drift_cap : grid.spacing(); }
};

/// One Strang split-step of ∂φ/∂τ = [(1/2)∇² - V]φ followed by renormalisation
/// to unit norm. `kinetic_factor` comes from SpectralKinetic::propagator_factor(dtau).
/// Throws NumericalError when the result is not finite.
void step_guide_wave(std::span<double> wave, std::span<const double> v_total, double dtau,
                     const SpectralKinetic& kinetic, std::span<const double> kinetic_factor,
                     double cell_volume);

Field step_guide_wave(const Field& wave, const Field& v_total, double dtau);

/// Rayleigh quotient <φ|-(1/2)∇² + V|φ> / <φ|φ>.
double rayleigh_energy(std::span<const double> wave, std::span<const double> potential,
                       const SpectralKinetic& kinetic);

double max_abs(std::span<const double> wave);

/// Drift ∇φ/φ at r (ħ = m = 1), from the centred-difference gradient and φ
/// interpolated at r. Near nodes (|φ(r)| < drift_epsilon·max|φ|) the walker is
/// pushed up-hill in |φ| at the cap; otherwise |v|·dtau is clamped to the cap.
Position drift_velocity(const Grid& grid, std::span<const double> wave, const Position& r,
                        const StepParams& params, double wave_max);
Position drift_velocity(const Grid& grid, std::span<const double> wave, const Position& r,
                        const StepParams& params);

/// wrap(r + v·dtau + noise·sqrt(dtau)); noise holds standard normal deviates.
Position step_walker(const Grid& grid, const Position& r, std::span<const double> wave,
                     const StepParams& params, const Position& noise, double wave_max);
Position step_walker(const Grid& grid, const Position& r, std::span<const double> wave,
                     const StepParams& params, const Position& noise);

}  // namespace tdqmc
