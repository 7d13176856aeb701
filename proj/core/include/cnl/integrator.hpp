#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "cnl/forces.hpp"
#include "cnl/rng.hpp"
#include "cnl/units.hpp"

namespace cnl {

/// Phase-space point in internal units.
struct PhasePoint {
    double z1 = 0.0;
    double p1 = 0.0;
    double z2 = 0.0;
    double p2 = 0.0;
    double t = 0.0;

    bool finite() const;
};

/// Momentum diffusion amplitudes sqrt(2 Gamma m k T), internal units.
struct NoiseSpec {
    std::array<double, 2> amplitude{};
    std::array<bool, 2> enabled{};

    bool active(std::size_t i) const { return enabled[i] && amplitude[i] > 0.0; }
};

struct TrajectoryRecord {
    std::vector<PhasePoint> samples;
    bool censored = false;
    std::optional<double> censor_time;
};

/// Coupled underdamped Langevin dynamics of the two particles.
///
/// SplitExactHarmonic composes half an interaction kick, half a trap period
/// solved exactly, an exact Ornstein-Uhlenbeck update of the momenta, the other
/// half rotation and the closing kick. StochasticHeun is the explicit
/// trapezoidal predictor-corrector with the additive noise applied once.
class LangevinIntegrator {
public:
    /// Precomputed per-dt factors for the split scheme.
    struct StepCoefficients {
        double dt = 0.0;
        std::array<double, 2> cos_half{};
        std::array<double, 2> sin_half{};
        std::array<double, 2> decay{};
        std::array<double, 2> kick_sigma{};
        std::array<double, 2> heun_sigma{};
    };

    /// All arguments in internal units.
    LangevinIntegrator(ForceField field, std::array<double, 2> damping, NoiseSpec noise, Scheme scheme,
                       double z_cutoff);

    /// Internal-unit integrator for an SI configuration.
    static LangevinIntegrator from_config(const SystemConfig& config, const UnitScales& scales);

    const ForceField& field() const { return field_; }
    const NoiseSpec& noise() const { return noise_; }
    Scheme scheme() const { return scheme_; }
    double z_cutoff() const { return z_cutoff_; }

    /// min(1/w1, 1/w2) / 200.
    double default_dt() const;
    /// Throws ConfigError unless 0 < dt and dt max(w1, w2) <= 0.1.
    void check_dt(double dt) const;

    StepCoefficients coefficients(double dt) const;

    /// Advances in place. Returns false when the new point is not finite.
    bool step(PhasePoint& point, const StepCoefficients& coeff, RandomStream& rng) const;
    bool step(PhasePoint& point, double dt, RandomStream& rng) const;

    /// Samples the trajectory at each scheduled time (internal units, strictly
    /// increasing, >= initial.t). Intervals are split into whole substeps no
    /// longer than dt. Stops and flags censoring on escape or non-finite values.
    TrajectoryRecord integrate(const PhasePoint& initial, std::span<const double> schedule, double dt,
                               RandomStream& rng) const;

    bool within_bounds(const PhasePoint& point) const;
    double energy(const PhasePoint& point) const;

private:
    void split_step(PhasePoint& x, const StepCoefficients& c, RandomStream& rng) const;
    void heun_step(PhasePoint& x, const StepCoefficients& c, RandomStream& rng) const;

    ForceField field_;
    std::array<double, 2> damping_;
    NoiseSpec noise_;
    Scheme scheme_;
    double z_cutoff_;
};

}  // namespace cnl
