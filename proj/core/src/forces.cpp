#include "cnl/forces.hpp"

#include <cmath>

namespace cnl {

ForceField::ForceField(const SystemConfig& config) {
    config.coupling.validate();
    for (const auto& p : config.particles) p.validate();
    mode_ = config.coupling.mode;
    kappa_ = config.coupling.kappa;
    d_ = config.coupling.separation;
    residual_ = config.coupling.compensation_residual;
    min_separation_ = config.coupling.min_separation_fraction * d_;
    for (std::size_t i = 0; i < 2; ++i) {
        mass_[i] = config.particles[i].mass;
        omega_[i] = config.particles[i].trap_omega;
    }
}

ForceField ForceField::rescaled(const UnitScales& scales) const {
    ForceField out;
    out.mode_ = mode_;
    out.residual_ = residual_;
    out.kappa_ = scales.to_internal(CouplingStrength{kappa_});
    out.d_ = scales.to_internal(Length{d_});
    out.min_separation_ = scales.to_internal(Length{min_separation_});
    for (std::size_t i = 0; i < 2; ++i) {
        out.mass_[i] = scales.to_internal(Mass{mass_[i]});
        out.omega_[i] = scales.to_internal(Rate{omega_[i]});
    }
    return out;
}

ForcePair ForceField::cubic_interaction(double u) const {
    const double d2 = d_ * d_;
    const double f2 = 3.0 * kappa_ * u * u / (d2 * d2) + residual_ * 2.0 * kappa_ * u / (d2 * d_);
    return {-f2, f2};
}

ForcePair ForceField::coulomb_interaction(double u) const {
    const double s = d_ - u;
    const double f2 = kappa_ / (s * s);
    return {-f2, f2};
}

ForcePair ForceField::harmonic_interaction(double u) const {
    const double d2 = d_ * d_;
    const double f2 = kappa_ / d2 + 2.0 * kappa_ * u / (d2 * d_);
    return {-f2, f2};
}

ForcePair ForceField::interaction(double z1, double z2) const {
    const double u = z1 - z2;
    switch (mode_) {
    case ForceMode::FullCoulomb: return coulomb_interaction(u);
    case ForceMode::HarmonicCoupled: return harmonic_interaction(u);
    case ForceMode::CompensatedCubic: return cubic_interaction(u);
    }
    return {};
}

ForcePair ForceField::trap(double z1, double z2) const {
    return {-mass_[0] * omega_[0] * omega_[0] * z1, -mass_[1] * omega_[1] * omega_[1] * z2};
}

ForcePair ForceField::total(double z1, double z2) const {
    const auto fi = interaction(z1, z2);
    const auto ft = trap(z1, z2);
    return {fi.on1 + ft.on1, fi.on2 + ft.on2};
}

double ForceField::interaction_potential(double z1, double z2) const {
    const double u = z1 - z2;
    const double d2 = d_ * d_;
    switch (mode_) {
    case ForceMode::FullCoulomb: return kappa_ / (d_ - u);
    case ForceMode::HarmonicCoupled: return kappa_ / d_ + kappa_ * u / d2 + kappa_ * u * u / (d2 * d_);
    case ForceMode::CompensatedCubic:
        return kappa_ * u * u * u / (d2 * d2) + residual_ * kappa_ * u * u / (d2 * d_);
    }
    return 0.0;
}

double ForceField::trap_potential(double z1, double z2) const {
    return 0.5 * mass_[0] * omega_[0] * omega_[0] * z1 * z1 + 0.5 * mass_[1] * omega_[1] * omega_[1] * z2 * z2;
}

ForcePair ForceField::force_cubic(double z1, double z2) const {
    const auto fi = cubic_interaction(z1 - z2);
    const auto ft = trap(z1, z2);
    return {fi.on1 + ft.on1, fi.on2 + ft.on2};
}

ForcePair ForceField::force_full_coulomb(double z1, double z2) const {
    const auto fi = coulomb_interaction(z1 - z2);
    const auto ft = trap(z1, z2);
    return {fi.on1 + ft.on1, fi.on2 + ft.on2};
}

ForcePair ForceField::force_harmonic(double z1, double z2) const {
    const auto fi = harmonic_interaction(z1 - z2);
    const auto ft = trap(z1, z2);
    return {fi.on1 + ft.on1, fi.on2 + ft.on2};
}

bool ForceField::separation_valid(double z1, double z2) const {
    if (mode_ != ForceMode::FullCoulomb) return true;
    return std::abs(separation_at(z1, z2)) >= min_separation_;
}

double ForceField::effective_potential_z2(double z2, double mean_z1) const {
    const double d4 = d_ * d_ * d_ * d_;
    const double stiffness = 0.5 * mass_[1] * omega_[1] * omega_[1] + 3.0 * kappa_ * mean_z1 / d4;
    return -3.0 * kappa_ * mean_z1 * mean_z1 * z2 / d4 + stiffness * z2 * z2 - kappa_ * z2 * z2 * z2 / d4;
}

double ForceField::effective_potential_z1(double z1, double mean_z2) const {
    const double d4 = d_ * d_ * d_ * d_;
    const double stiffness = 0.5 * mass_[0] * omega_[0] * omega_[0] - 3.0 * kappa_ * mean_z2 / d4;
    return 3.0 * kappa_ * mean_z2 * mean_z2 * z1 / d4 + stiffness * z1 * z1 + kappa_ * z1 * z1 * z1 / d4;
}

std::optional<double> ForceField::critical_displacement() const {
    if (kappa_ <= 0.0) return std::nullopt;
    const double d4 = d_ * d_ * d_ * d_;
    return mass_[0] * omega_[0] * omega_[0] * d4 / (6.0 * kappa_);
}

}  // namespace cnl
