#include "cnl/state_prep.hpp"

#include <cmath>

#include <fmt/format.h>

namespace cnl {

namespace {

constexpr double kQuantumTolerance = 1e-9;

}  // namespace

std::string_view to_string(StateLabel label) {
    switch (label) {
    case StateLabel::Thermal: return "thermal";
    case StateLabel::ThermalSqueezed: return "thermal-squeezed";
    case StateLabel::QuantumGround: return "quantum-ground";
    case StateLabel::QuantumSqueezed: return "quantum-squeezed";
    case StateLabel::FreefallAmplified: return "freefall-amplified";
    case StateLabel::Custom: return "custom";
    }
    return "unknown";
}

bool GaussianState::is_quantum() const {
    return label == StateLabel::QuantumGround || label == StateLabel::QuantumSqueezed ||
           label == StateLabel::FreefallAmplified;
}

void GaussianState::validate() const {
    if (!std::isfinite(mean_z) || !std::isfinite(mean_p)) throw ConfigError("state means must be finite");
    if (label == StateLabel::Custom) {
        if (!(sigma_z >= 0.0) || !(sigma_p >= 0.0) || !std::isfinite(sigma_z) || !std::isfinite(sigma_p))
            throw ConfigError("state sigmas must be finite and >= 0");
        return;
    }
    if (!(sigma_z > 0.0) || !(sigma_p > 0.0) || !std::isfinite(sigma_z) || !std::isfinite(sigma_p))
        throw ConfigError(fmt::format("{} state requires sigma_z > 0 and sigma_p > 0", to_string(label)));
    if (is_quantum() && uncertainty_product() < 0.5 * PhysicalConstants::hbar * (1.0 - kQuantumTolerance))
        throw ConfigError(fmt::format("{} state violates sigma_z sigma_p >= hbar/2", to_string(label)));
}

GaussianState thermal_state(const ParticleParams& params, double temperature, bool quantum_floor) {
    params.validate();
    if (!std::isfinite(temperature) || temperature < 0.0)
        throw ConfigError(fmt::format("temperature must be >= 0, got {}", temperature));
    if (temperature == 0.0) {
        if (quantum_floor) return quantum_ground_state(params);
        throw ConfigError("zero-temperature classical state");
    }
    const double kt = PhysicalConstants::boltzmann * temperature;
    const double w = params.trap_omega;
    GaussianState s;
    s.sigma_z = std::sqrt(kt / (params.mass * w * w));
    s.sigma_p = std::sqrt(params.mass * kt);
    s.label = StateLabel::Thermal;
    return s;
}

GaussianState thermally_squeezed_state(const ParticleParams& params, double temperature, double target_sigma_z) {
    if (!(target_sigma_z > 0.0) || !std::isfinite(target_sigma_z))
        throw ConfigError(fmt::format("target sigma_z must be > 0, got {}", target_sigma_z));
    auto s = thermal_state(params, temperature);
    s.sigma_p *= s.sigma_z / target_sigma_z;
    s.sigma_z = target_sigma_z;
    s.label = StateLabel::ThermalSqueezed;
    return s;
}

GaussianState quantum_ground_state(const ParticleParams& params) {
    params.validate();
    const double mw = params.mass * params.trap_omega;
    GaussianState s;
    s.sigma_z = std::sqrt(PhysicalConstants::hbar / (2.0 * mw));
    s.sigma_p = std::sqrt(PhysicalConstants::hbar * mw / 2.0);
    s.label = StateLabel::QuantumGround;
    return s;
}

GaussianState apply_squeeze(const GaussianState& state, double xi) {
    if (!(xi > 0.0) || !std::isfinite(xi)) throw ConfigError(fmt::format("squeeze factor must be > 0, got {}", xi));
    auto s = state;
    s.sigma_z *= xi;
    s.sigma_p /= xi;
    if (state.label == StateLabel::QuantumGround) s.label = StateLabel::QuantumSqueezed;
    return s;
}

GaussianState freefall_amplify(const GaussianState& state, double t_ff, double mass) {
    if (!(t_ff >= 0.0) || !std::isfinite(t_ff)) throw ConfigError("freefall time must be >= 0");
    if (!(mass > 0.0)) throw ConfigError("freefall requires a positive mass");
    if (t_ff == 0.0) return state;
    auto s = state;
    const double spread = state.sigma_p * t_ff / mass;
    s.sigma_z = std::hypot(state.sigma_z, spread);
    s.mean_z = state.mean_z + state.mean_p * t_ff / mass;
    if (state.is_quantum()) s.label = StateLabel::FreefallAmplified;
    return s;
}

double freefall_time_for(const GaussianState& state, double target_sigma_z, double mass) {
    if (target_sigma_z <= state.sigma_z) return 0.0;
    if (!(state.sigma_p > 0.0)) throw ConfigError("freefall cannot widen a state without momentum spread");
    return mass * std::sqrt(target_sigma_z * target_sigma_z - state.sigma_z * state.sigma_z) / state.sigma_p;
}

GaussianState custom_state(double mean_z, double mean_p, double sigma_z, double sigma_p) {
    GaussianState s{mean_z, mean_p, sigma_z, sigma_p, StateLabel::Custom};
    s.validate();
    return s;
}

double squeeze_factor_for(const ParticleParams& params, double target_sigma_z) {
    return target_sigma_z / quantum_ground_state(params).sigma_z;
}

PhaseSample sample_one(const GaussianState& state, RandomStream& rng) {
    const double gz = rng.normal();
    const double gp = rng.normal();
    return {state.mean_z + state.sigma_z * gz, state.mean_p + state.sigma_p * gp};
}

std::vector<PhaseSample> sample(const GaussianState& state, std::size_t n, RandomStream& rng) {
    if (n == 0) throw ConfigError("sample count must be >= 1");
    std::vector<PhaseSample> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(sample_one(state, rng));
    return out;
}

}  // namespace cnl
