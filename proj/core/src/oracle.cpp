#include "cnl/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace cnl::oracle {

namespace {

double d4(double d) { return d * d * d * d; }

double freq_tuned_phase_factor(double theta) { return 2.0 * theta + std::sin(2.0 * theta); }

}  // namespace

OracleInput make_input(const SystemConfig& system, const std::array<GaussianState, 2>& states, double t) {
    OracleInput in;
    in.kappa = system.coupling.kappa;
    in.separation = system.coupling.separation;
    in.m1 = system.particles[0].mass;
    in.m2 = system.particles[1].mass;
    in.omega1 = system.particles[0].trap_omega;
    in.omega2 = system.particles[1].trap_omega;
    in.sigma_z1 = states[0].sigma_z;
    in.sigma_z2 = states[1].sigma_z;
    in.sigma_p2 = states[1].sigma_p;
    in.t = t;
    return in;
}

double heuristic_drift(double kappa, double separation, const InitialMoments& m, double t) {
    return 3.0 * kappa * (m.mean_sq_z1 - 2.0 * m.mean_z2 * m.mean_z1 + m.mean_sq_z2) * t / d4(separation);
}

Prediction classical_mass_tuned(const OracleInput& in) {
    return {3.0 * in.kappa * in.t * in.sigma_z1 * in.sigma_z1 / d4(in.separation), kSnrBound};
}

Prediction classical_freq_tuned(const OracleInput& in) {
    const double theta = in.omega1 * in.t;
    const double mean = 3.0 * in.kappa / (4.0 * d4(in.separation) * in.omega1) * freq_tuned_phase_factor(theta) *
                        in.sigma_z1 * in.sigma_z1;
    return {mean, kSnrBound};
}

Prediction quantum_mass_tuned(const OracleInput& in) {
    Prediction out = classical_mass_tuned(in);
    if (in.t <= 0.0) return {out.mean_p2, 0.0};
    const double d8 = d4(in.separation) * d4(in.separation);
    const double s4 = std::pow(in.sigma_z1, 4);
    const double k2 = in.kappa * in.kappa;
    const double w2sq = in.omega2 * in.omega2;
    const double position_term = in.m2 * in.m2 * w2sq * w2sq * d8 * in.sigma_z2 * in.sigma_z2 / (18.0 * k2 * s4);
    const double momentum_term = d8 * in.sigma_p2 * in.sigma_p2 / (18.0 * k2 * s4 * in.t * in.t);
    out.snr = kSnrBound / std::sqrt(1.0 + position_term + momentum_term);
    return out;
}

Prediction quantum_freq_tuned(const OracleInput& in) {
    Prediction out = classical_freq_tuned(in);
    const double phase = freq_tuned_phase_factor(in.omega1 * in.t);
    if (in.t <= 0.0 || phase <= 0.0) return {out.mean_p2, 0.0};
    const double d8 = d4(in.separation) * d4(in.separation);
    const double numerator = 8.0 * in.omega2 * in.omega2 * d8 * in.sigma_p2 * in.sigma_p2 +
                             8.0 * in.omega1 * in.omega1 * d8 * in.t * in.t * in.sigma_z2 * in.sigma_z2;
    const double denominator = 9.0 * in.kappa * in.kappa * std::pow(in.sigma_z1, 4) * phase * phase;
    out.snr = kSnrBound / std::sqrt(1.0 + numerator / denominator);
    return out;
}

std::vector<IdentityCheck> identity_suite() {
    const auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); };

    OracleInput base;
    base.kappa = 2.3e-24;
    base.separation = 3e-6;
    base.m1 = 8e-16;
    base.m2 = 8e-17;
    base.omega1 = 5e4;
    base.omega2 = 5e4;
    base.sigma_z1 = 30e-9;
    base.t = 2e-6;

    std::vector<IdentityCheck> out;

    // 2 theta + sin 2 theta = 4 theta (1 - theta^2/3 + ...): pick theta small enough
    // that the truncation sits below double rounding.
    auto small = base;
    small.omega1 = 2.5e6;
    small.t = 1e-8 / small.omega1;
    out.push_back({"freq-tuned mean -> mass-tuned mean as w1 t -> 0",
                   rel(classical_freq_tuned(small).mean_p2, classical_mass_tuned(small).mean_p2)});

    out.push_back({"quantum mass-tuned SNR with noiseless particle 2", rel(quantum_mass_tuned(base).snr, kSnrBound)});
    out.push_back({"quantum mass-tuned mean equals classical",
                   rel(quantum_mass_tuned(base).mean_p2, classical_mass_tuned(base).mean_p2)});

    auto stiff = base;
    stiff.omega1 = 2.5e6;
    out.push_back({"quantum freq-tuned SNR with noiseless particle 2", rel(quantum_freq_tuned(stiff).snr, kSnrBound)});
    out.push_back({"quantum freq-tuned mean equals classical",
                   rel(quantum_freq_tuned(stiff).mean_p2, classical_freq_tuned(stiff).mean_p2)});

    const InitialMoments centred{0.0, base.sigma_z1 * base.sigma_z1, 0.0, 0.0};
    out.push_back({"heuristic drift with particle 2 at rest equals mass-tuned mean",
                   rel(heuristic_drift(base.kappa, base.separation, centred, base.t),
                       classical_mass_tuned(base).mean_p2)});
    return out;
}

double snr_quadratic_bound(std::size_t n, RandomStream& rng) {
    if (n < 10000) throw ConfigError("snr_quadratic_bound needs at least 1e4 samples");
    // Welford running moments of y = z^2.
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = rng.normal();
        const double y = z * z;
        const double delta = y - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (y - mean);
    }
    return mean / std::sqrt(m2 / static_cast<double>(n - 1));
}

}  // namespace cnl::oracle
