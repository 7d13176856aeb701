#include "cnl/integrator.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace cnl {

bool PhasePoint::finite() const {
    return std::isfinite(z1) && std::isfinite(p1) && std::isfinite(z2) && std::isfinite(p2);
}

LangevinIntegrator::LangevinIntegrator(ForceField field, std::array<double, 2> damping, NoiseSpec noise,
                                       Scheme scheme, double z_cutoff)
    : field_(std::move(field)), damping_(damping), noise_(noise), scheme_(scheme), z_cutoff_(z_cutoff) {
    for (std::size_t i = 0; i < 2; ++i) {
        if (!(damping_[i] >= 0.0)) throw ConfigError("damping must be >= 0");
        if (!(noise_.amplitude[i] >= 0.0)) throw ConfigError("noise amplitude must be >= 0");
    }
    if (!(z_cutoff_ > 0.0)) throw ConfigError("z cutoff must be > 0");
}

LangevinIntegrator LangevinIntegrator::from_config(const SystemConfig& config, const UnitScales& scales) {
    config.validate();
    auto field = ForceField(config).rescaled(scales);
    std::array<double, 2> damping{};
    NoiseSpec noise;
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& p = config.particles[i];
        damping[i] = scales.to_internal(Rate{p.damping_rate});
        const double m = scales.to_internal(Mass{p.mass});
        const double kt = scales.thermal_energy(p.bath_temperature);
        noise.amplitude[i] = std::sqrt(2.0 * damping[i] * m * kt);
        noise.enabled[i] = config.integration.thermal_noise;
    }
    const double cutoff = config.integration.z_cutoff * scales.to_internal(Length{config.coupling.separation});
    return LangevinIntegrator(std::move(field), damping, noise, config.integration.scheme, cutoff);
}

double LangevinIntegrator::default_dt() const {
    return std::min(1.0 / field_.omega(0), 1.0 / field_.omega(1)) / 200.0;
}

void LangevinIntegrator::check_dt(double dt) const {
    const double wmax = std::max(field_.omega(0), field_.omega(1));
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError(fmt::format("time step must be > 0, got {}", dt));
    if (dt * wmax > 0.1 * (1.0 + 1e-12))
        throw ConfigError(fmt::format("time step too large: dt * max(w) = {:.4g} exceeds 0.1", dt * wmax));
}

LangevinIntegrator::StepCoefficients LangevinIntegrator::coefficients(double dt) const {
    check_dt(dt);
    StepCoefficients c;
    c.dt = dt;
    for (std::size_t i = 0; i < 2; ++i) {
        const double phase = 0.5 * field_.omega(i) * dt;
        c.cos_half[i] = std::cos(phase);
        c.sin_half[i] = std::sin(phase);
        const double g = damping_[i];
        const double b = noise_.active(i) ? noise_.amplitude[i] : 0.0;
        c.decay[i] = std::exp(-g * dt);
        // Exact OU variance b^2 (1 - exp(-2 g dt)) / (2 g), with the g -> 0 limit b^2 dt.
        const double var = g > 0.0 ? b * b * (-std::expm1(-2.0 * g * dt)) / (2.0 * g) : b * b * dt;
        c.kick_sigma[i] = std::sqrt(var);
        c.heun_sigma[i] = b * std::sqrt(dt);
    }
    return c;
}

void LangevinIntegrator::split_step(PhasePoint& x, const StepCoefficients& c, RandomStream& rng) const {
    const double h = c.dt;
    auto f = field_.interaction(x.z1, x.z2);
    x.p1 += 0.5 * h * f.on1;
    x.p2 += 0.5 * h * f.on2;

    auto rotate = [&](double& z, double& p, std::size_t i) {
        const double mw = field_.mass(i) * field_.omega(i);
        const double z0 = z;
        z = c.cos_half[i] * z0 + c.sin_half[i] * p / mw;
        p = c.cos_half[i] * p - c.sin_half[i] * mw * z0;
    };
    rotate(x.z1, x.p1, 0);
    rotate(x.z2, x.p2, 1);

    x.p1 *= c.decay[0];
    x.p2 *= c.decay[1];
    if (c.kick_sigma[0] > 0.0) x.p1 += c.kick_sigma[0] * rng.normal();
    if (c.kick_sigma[1] > 0.0) x.p2 += c.kick_sigma[1] * rng.normal();

    rotate(x.z1, x.p1, 0);
    rotate(x.z2, x.p2, 1);

    f = field_.interaction(x.z1, x.z2);
    x.p1 += 0.5 * h * f.on1;
    x.p2 += 0.5 * h * f.on2;
    x.t += h;
}

void LangevinIntegrator::heun_step(PhasePoint& x, const StepCoefficients& c, RandomStream& rng) const {
    const double h = c.dt;
    const double m1 = field_.mass(0);
    const double m2 = field_.mass(1);
    const double w1 = c.heun_sigma[0] > 0.0 ? c.heun_sigma[0] * rng.normal() : 0.0;
    const double w2 = c.heun_sigma[1] > 0.0 ? c.heun_sigma[1] * rng.normal() : 0.0;

    const auto f0 = field_.total(x.z1, x.z2);
    const double dz1 = x.p1 / m1;
    const double dz2 = x.p2 / m2;
    const double dp1 = f0.on1 - damping_[0] * x.p1;
    const double dp2 = f0.on2 - damping_[1] * x.p2;

    const double zt1 = x.z1 + h * dz1;
    const double zt2 = x.z2 + h * dz2;
    const double pt1 = x.p1 + h * dp1 + w1;
    const double pt2 = x.p2 + h * dp2 + w2;

    const auto f1 = field_.total(zt1, zt2);
    x.z1 += 0.5 * h * (dz1 + pt1 / m1);
    x.z2 += 0.5 * h * (dz2 + pt2 / m2);
    x.p1 += 0.5 * h * (dp1 + f1.on1 - damping_[0] * pt1) + w1;
    x.p2 += 0.5 * h * (dp2 + f1.on2 - damping_[1] * pt2) + w2;
    x.t += h;
}

bool LangevinIntegrator::step(PhasePoint& point, const StepCoefficients& coeff, RandomStream& rng) const {
    if (scheme_ == Scheme::SplitExactHarmonic)
        split_step(point, coeff, rng);
    else
        heun_step(point, coeff, rng);
    return point.finite();
}

bool LangevinIntegrator::step(PhasePoint& point, double dt, RandomStream& rng) const {
    return step(point, coefficients(dt), rng);
}

bool LangevinIntegrator::within_bounds(const PhasePoint& point) const {
    return point.finite() && std::abs(point.z1) <= z_cutoff_ && std::abs(point.z2) <= z_cutoff_ &&
           field_.separation_valid(point.z1, point.z2);
}

TrajectoryRecord LangevinIntegrator::integrate(const PhasePoint& initial, std::span<const double> schedule,
                                               double dt, RandomStream& rng) const {
    check_dt(dt);
    double previous = initial.t;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        if (!std::isfinite(schedule[k]) || schedule[k] < initial.t || (k > 0 && schedule[k] <= schedule[k - 1]))
            throw ConfigError("output schedule must be finite, strictly increasing and start at or after t0");
    }

    TrajectoryRecord record;
    if (schedule.empty()) {
        record.samples.push_back(initial);
        return record;
    }
    record.samples.reserve(schedule.size());

    PhasePoint x = initial;
    if (!within_bounds(x)) {
        record.censored = true;
        record.censor_time = x.t;
        return record;
    }

    std::optional<StepCoefficients> cached;
    for (const double target : schedule) {
        const double interval = target - previous;
        if (interval > 0.0) {
            const auto substeps = static_cast<long>(std::ceil(interval / dt * (1.0 - 1e-12)));
            const double h = interval / static_cast<double>(std::max(1L, substeps));
            if (!cached || cached->dt != h) cached = coefficients(h);
            for (long s = 0; s < std::max(1L, substeps); ++s) {
                step(x, *cached, rng);
                if (!within_bounds(x)) {
                    record.censored = true;
                    record.censor_time = x.t;
                    return record;
                }
            }
        }
        x.t = target;
        record.samples.push_back(x);
        previous = target;
    }
    return record;
}

double LangevinIntegrator::energy(const PhasePoint& x) const {
    const double kinetic = 0.5 * x.p1 * x.p1 / field_.mass(0) + 0.5 * x.p2 * x.p2 / field_.mass(1);
    return kinetic + field_.potential(x.z1, x.z2);
}

}  // namespace cnl
