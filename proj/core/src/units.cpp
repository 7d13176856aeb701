#include "cnl/units.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace cnl {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

std::string_view to_string(ForceMode mode) {
    switch (mode) {
    case ForceMode::FullCoulomb: return "full-coulomb";
    case ForceMode::HarmonicCoupled: return "harmonic";
    case ForceMode::CompensatedCubic: return "cubic";
    }
    return "unknown";
}

std::string_view to_string(Regime regime) {
    switch (regime) {
    case Regime::Symmetric: return "symmetric";
    case Regime::MassTuned: return "mass-tuned";
    case Regime::FrequencyTuned: return "freq-tuned";
    case Regime::Custom: return "custom";
    }
    return "unknown";
}

std::string_view to_string(Scheme scheme) {
    switch (scheme) {
    case Scheme::SplitExactHarmonic: return "split-exact-harmonic";
    case Scheme::StochasticHeun: return "stochastic-heun";
    }
    return "unknown";
}

ForceMode force_mode_from_string(std::string_view name) {
    if (name == "full-coulomb") return ForceMode::FullCoulomb;
    if (name == "harmonic") return ForceMode::HarmonicCoupled;
    if (name == "cubic") return ForceMode::CompensatedCubic;
    throw ConfigError(fmt::format("unknown force mode '{}' (expected full-coulomb, harmonic, cubic)", name));
}

Regime regime_from_string(std::string_view name) {
    if (name == "symmetric") return Regime::Symmetric;
    if (name == "mass-tuned") return Regime::MassTuned;
    if (name == "freq-tuned") return Regime::FrequencyTuned;
    if (name == "custom") return Regime::Custom;
    throw ConfigError(
        fmt::format("unknown regime '{}' (expected symmetric, mass-tuned, freq-tuned, custom)", name));
}

Scheme scheme_from_string(std::string_view name) {
    if (name == "split" || name == "split-exact-harmonic") return Scheme::SplitExactHarmonic;
    if (name == "heun" || name == "stochastic-heun") return Scheme::StochasticHeun;
    throw ConfigError(fmt::format("unknown integration scheme '{}' (expected split, heun)", name));
}

void ParticleParams::validate() const {
    if (!positive_finite(mass)) throw ConfigError(fmt::format("particle mass must be > 0, got {}", mass));
    if (!positive_finite(trap_omega))
        throw ConfigError(fmt::format("trap frequency must be > 0, got {}", trap_omega));
    if (!std::isfinite(damping_rate) || damping_rate < 0.0)
        throw ConfigError(fmt::format("damping rate must be >= 0, got {}", damping_rate));
    if (!std::isfinite(bath_temperature) || bath_temperature < 0.0)
        throw ConfigError(fmt::format("bath temperature must be >= 0, got {}", bath_temperature));
    if (!std::isfinite(charge)) throw ConfigError("particle charge must be finite");
}

void CouplingParams::validate() const {
    if (!std::isfinite(kappa) || kappa < 0.0)
        throw ConfigError(fmt::format("coupling kappa must be >= 0, got {}", kappa));
    if (!positive_finite(separation))
        throw ConfigError(fmt::format("separation d must be > 0, got {}", separation));
    if (!(compensation_residual >= 0.0 && compensation_residual <= 1.0))
        throw ConfigError(
            fmt::format("compensation residual must lie in [0, 1], got {}", compensation_residual));
    if (!(min_separation_fraction > 0.0 && min_separation_fraction < 1.0))
        throw ConfigError("minimum separation fraction must lie in (0, 1)");
}

void SystemConfig::validate() const {
    for (const auto& p : particles) p.validate();
    coupling.validate();
    if (!std::isfinite(integration.dt) || integration.dt < 0.0)
        throw ConfigError("integration dt must be >= 0 (0 selects the default)");
    if (!positive_finite(integration.z_cutoff)) throw ConfigError("z cutoff must be > 0");
}

double charge_to_kappa(double q1, double q2) {
    return q1 * q2 / (4.0 * std::numbers::pi * PhysicalConstants::vacuum_permittivity);
}

double cubic_coupling(const SystemConfig& config) {
    const auto& p2 = config.particles[1];
    const double d = config.coupling.separation;
    return 3.0 * config.coupling.kappa / (p2.mass * p2.trap_omega * p2.trap_omega * d * d * d);
}

UnitScales::UnitScales(double length, double time, double mass)
    : length_(length), time_(time), mass_(mass) {
    if (!positive_finite(length) || !positive_finite(time) || !positive_finite(mass))
        throw ConfigError("unit scales must be positive and finite");
}

double UnitScales::thermal_energy(double temperature) const {
    return PhysicalConstants::boltzmann * temperature / energy();
}

double UnitScales::hbar() const { return PhysicalConstants::hbar / (energy() * time_); }

UnitScales make_unit_scales(const SystemConfig& config) {
    const auto& p2 = config.particles[1];
    return UnitScales(config.coupling.separation, 1.0 / p2.trap_omega, p2.mass);
}

}  // namespace cnl
