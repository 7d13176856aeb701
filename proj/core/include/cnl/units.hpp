#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cnl {

/// Thrown for invalid physical parameters or configuration input.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// CODATA 2018 values, SI.
struct PhysicalConstants {
    static constexpr double boltzmann = 1.380649e-23;          // J/K
    static constexpr double hbar = 1.054571817e-34;            // J s
    static constexpr double vacuum_permittivity = 8.8541878128e-12;  // C^2/(J m)
};

enum class ForceMode { FullCoulomb, HarmonicCoupled, CompensatedCubic };

/// Symmetric, mass-tuned (m1 >> m2) or frequency-tuned (w1 >> w2).
enum class Regime { Symmetric, MassTuned, FrequencyTuned, Custom };

enum class Scheme { SplitExactHarmonic, StochasticHeun };

std::string_view to_string(ForceMode mode);
std::string_view to_string(Regime regime);
std::string_view to_string(Scheme scheme);
ForceMode force_mode_from_string(std::string_view name);
Regime regime_from_string(std::string_view name);
Scheme scheme_from_string(std::string_view name);

struct ParticleParams {
    double mass = 0.0;              // kg
    double trap_omega = 0.0;        // rad/s
    double charge = 0.0;            // C, only used to derive kappa
    double damping_rate = 0.0;      // 1/s
    double bath_temperature = 0.0;  // K

    void validate() const;
};

struct CouplingParams {
    double kappa = 0.0;       // N m^2
    double separation = 0.0;  // m
    ForceMode mode = ForceMode::CompensatedCubic;
    /// Fraction of the linear interaction force left after compensation.
    /// Zero is optimal compensation.
    double compensation_residual = 0.0;
    /// Full-Coulomb trajectories closer than this fraction of d are invalid.
    double min_separation_fraction = 0.01;

    void validate() const;
};

struct IntegrationControls {
    /// Step in seconds; zero selects min(1/w1, 1/w2)/200.
    double dt = 0.0;
    /// Censoring threshold on |z_i| as a fraction of d.
    double z_cutoff = 0.5;
    Scheme scheme = Scheme::SplitExactHarmonic;
    /// Thermal bath noise; quantum runs switch it off.
    bool thermal_noise = true;
};

struct SystemConfig {
    std::array<ParticleParams, 2> particles{};
    CouplingParams coupling{};
    Regime regime = Regime::Symmetric;
    IntegrationControls integration{};

    void validate() const;
};

/// kappa = q1 q2 / (4 pi eps0).
double charge_to_kappa(double q1, double q2);

/// Dimensionless cubic coupling 3 kappa / (m2 w2^2 d^3).
double cubic_coupling(const SystemConfig& config);

// Strongly typed SI quantities so that a length cannot be scaled as a time.
template <class Tag>
struct Quantity {
    double value = 0.0;
    constexpr explicit Quantity(double v = 0.0) : value(v) {}
};

struct LengthTag;
struct TimeTag;
struct MassTag;
struct MomentumTag;
struct EnergyTag;
struct ForceTag;
struct RateTag;
struct CouplingTag;

using Length = Quantity<LengthTag>;      // m
using Time = Quantity<TimeTag>;          // s
using Mass = Quantity<MassTag>;          // kg
using Momentum = Quantity<MomentumTag>;  // kg m/s
using Energy = Quantity<EnergyTag>;      // J
using Force = Quantity<ForceTag>;        // N
using Rate = Quantity<RateTag>;          // 1/s or rad/s
using CouplingStrength = Quantity<CouplingTag>;  // N m^2

/// Reference scales: L0 = d, T0 = 1/w2, M0 = m2.
class UnitScales {
public:
    UnitScales(double length, double time, double mass);

    double length() const { return length_; }
    double time() const { return time_; }
    double mass() const { return mass_; }
    double momentum() const { return mass_ * length_ / time_; }
    double energy() const { return mass_ * length_ * length_ / (time_ * time_); }
    double force() const { return energy() / length_; }

    double to_internal(Length q) const { return q.value / length_; }
    double to_internal(Time q) const { return q.value / time_; }
    double to_internal(Mass q) const { return q.value / mass_; }
    double to_internal(Momentum q) const { return q.value / momentum(); }
    double to_internal(Energy q) const { return q.value / energy(); }
    double to_internal(Force q) const { return q.value / force(); }
    double to_internal(Rate q) const { return q.value * time_; }
    double to_internal(CouplingStrength q) const { return q.value / (energy() * length_); }

    template <class Q>
    Q from_internal(double x) const;

    /// k_B T in internal energy units.
    double thermal_energy(double temperature) const;
    double hbar() const;

private:
    double length_;
    double time_;
    double mass_;
};

template <>
inline Length UnitScales::from_internal<Length>(double x) const { return Length{x * length_}; }
template <>
inline Time UnitScales::from_internal<Time>(double x) const { return Time{x * time_}; }
template <>
inline Mass UnitScales::from_internal<Mass>(double x) const { return Mass{x * mass_}; }
template <>
inline Momentum UnitScales::from_internal<Momentum>(double x) const { return Momentum{x * momentum()}; }
template <>
inline Energy UnitScales::from_internal<Energy>(double x) const { return Energy{x * energy()}; }
template <>
inline Force UnitScales::from_internal<Force>(double x) const { return Force{x * force()}; }
template <>
inline Rate UnitScales::from_internal<Rate>(double x) const { return Rate{x / time_}; }
template <>
inline CouplingStrength UnitScales::from_internal<CouplingStrength>(double x) const {
    return CouplingStrength{x * energy() * length_};
}

UnitScales make_unit_scales(const SystemConfig& config);

}  // namespace cnl
