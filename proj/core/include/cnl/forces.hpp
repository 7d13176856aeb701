#pragma once

#include <array>
#include <optional>

#include "cnl/units.hpp"

namespace cnl {

struct ForcePair {
    double on1 = 0.0;
    double on2 = 0.0;
};

/// Deterministic forces on the two particles along the trap axis.
///
/// Positions are displacements from the trap centres. The instantaneous
/// separation is s = d - (z1 - z2), which makes the expanded interaction
/// potential kappa/d + kappa u/d^2 + kappa u^2/d^3 + kappa u^3/d^4 + ...
/// with u = z1 - z2. Every formula is homogeneous, so the same field can be
/// evaluated in SI or, after rescaled(), in internal units.
class ForceField {
public:
    explicit ForceField(const SystemConfig& config);

    ForceField rescaled(const UnitScales& scales) const;

    ForceMode mode() const { return mode_; }
    double kappa() const { return kappa_; }
    double separation() const { return d_; }
    double residual() const { return residual_; }
    double mass(std::size_t i) const { return mass_[i]; }
    double omega(std::size_t i) const { return omega_[i]; }
    double min_separation() const { return min_separation_; }

    ForcePair interaction(double z1, double z2) const;
    ForcePair trap(double z1, double z2) const;
    ForcePair total(double z1, double z2) const;

    double interaction_potential(double z1, double z2) const;
    double trap_potential(double z1, double z2) const;
    double potential(double z1, double z2) const { return interaction_potential(z1, z2) + trap_potential(z1, z2); }

    // Mode-specific total forces (trap included), independent of mode().
    ForcePair force_cubic(double z1, double z2) const;
    ForcePair force_full_coulomb(double z1, double z2) const;
    ForcePair force_harmonic(double z1, double z2) const;

    double separation_at(double z1, double z2) const { return d_ - (z1 - z2); }
    /// False when the full-Coulomb separation drops below the configured minimum.
    bool separation_valid(double z1, double z2) const;

    /// Mean-field one-body potentials of the cubic model.
    double effective_potential_z2(double z2, double mean_z1) const;
    double effective_potential_z1(double z1, double mean_z2) const;

    /// <z2> at which particle 1's effective stiffness m1 w1^2/2 - 3 kappa <z2>/d^4
    /// changes sign. Empty when kappa = 0 (no instability).
    std::optional<double> critical_displacement() const;

private:
    ForceField() = default;

    ForcePair cubic_interaction(double u) const;
    ForcePair coulomb_interaction(double u) const;
    ForcePair harmonic_interaction(double u) const;

    ForceMode mode_ = ForceMode::CompensatedCubic;
    double kappa_ = 0.0;
    double d_ = 1.0;
    double residual_ = 0.0;
    double min_separation_ = 0.0;
    std::array<double, 2> mass_{};
    std::array<double, 2> omega_{};
};

}  // namespace cnl
