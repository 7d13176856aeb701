#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "cnl/rng.hpp"
#include "cnl/units.hpp"

namespace cnl {

enum class StateLabel { Thermal, ThermalSqueezed, QuantumGround, QuantumSqueezed, FreefallAmplified, Custom };

std::string_view to_string(StateLabel label);

/// Uncorrelated Gaussian in (z, p), SI units.
///
/// Sigmas are strictly positive for every label except Custom, which also
/// admits a zero spread (a particle prepared at rest). Quantum labels satisfy
/// sigma_z sigma_p >= hbar/2.
struct GaussianState {
    double mean_z = 0.0;
    double mean_p = 0.0;
    double sigma_z = 0.0;
    double sigma_p = 0.0;
    StateLabel label = StateLabel::Custom;

    bool is_quantum() const;
    double uncertainty_product() const { return sigma_z * sigma_p; }
    void validate() const;
};

struct PhaseSample {
    double z = 0.0;
    double p = 0.0;
};

/// Equilibrium state at temperature T: sigma_z^2 = kT/(m w^2), sigma_p^2 = m k T.
/// T = 0 is rejected unless quantum_floor is set, in which case the ground
/// state is returned.
GaussianState thermal_state(const ParticleParams& params, double temperature, bool quantum_floor = false);

/// Out-of-equilibrium state with sigma_z = target and the thermal phase-space area.
GaussianState thermally_squeezed_state(const ParticleParams& params, double temperature, double target_sigma_z);

GaussianState quantum_ground_state(const ParticleParams& params);

/// sigma_z -> xi sigma_z, sigma_p -> sigma_p / xi.
GaussianState apply_squeeze(const GaussianState& state, double xi);

/// Trap-free ballistic spreading for t_ff seconds.
GaussianState freefall_amplify(const GaussianState& state, double t_ff, double mass);

/// Freefall time that brings sigma_z to target (zero if already there or wider).
double freefall_time_for(const GaussianState& state, double target_sigma_z, double mass);

/// Custom state with explicit moments; zero spreads allowed.
GaussianState custom_state(double mean_z, double mean_p, double sigma_z, double sigma_p);

/// Squeeze factor that maps the ground state onto sigma_z = target.
double squeeze_factor_for(const ParticleParams& params, double target_sigma_z);

PhaseSample sample_one(const GaussianState& state, RandomStream& rng);
std::vector<PhaseSample> sample(const GaussianState& state, std::size_t n, RandomStream& rng);

}  // namespace cnl
