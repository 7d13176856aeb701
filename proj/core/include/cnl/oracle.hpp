#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "cnl/rng.hpp"
#include "cnl/state_prep.hpp"
#include "cnl/units.hpp"

namespace cnl::oracle {

/// SNR of a squared zero-mean Gaussian: <y> = s^2, Var(y) = 2 s^4.
inline constexpr double kSnrBound = 0.70710678118654752440;

/// SI inputs of the short-transient moment formulas.
struct OracleInput {
    double kappa = 0.0;
    double separation = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    double omega1 = 0.0;
    double omega2 = 0.0;
    double sigma_z1 = 0.0;
    double sigma_z2 = 0.0;
    double sigma_p2 = 0.0;
    double t = 0.0;
};

struct Prediction {
    double mean_p2 = 0.0;
    double snr = 0.0;
};

/// First and second moments of the initial positions.
struct InitialMoments {
    double mean_z1 = 0.0;
    double mean_sq_z1 = 0.0;
    double mean_z2 = 0.0;
    double mean_sq_z2 = 0.0;
};

OracleInput make_input(const SystemConfig& system, const std::array<GaussianState, 2>& states, double t);

/// 3 kappa (<z1^2> - 2 <z2><z1> + <z2^2>) t / d^4, with the positive sign of
/// the cubic force on particle 2.
double heuristic_drift(double kappa, double separation, const InitialMoments& m, double t);

/// Heavy noise particle (m1 >> m2), zero damping.
Prediction classical_mass_tuned(const OracleInput& in);

/// Stiff noise particle (w1 >> w2) released from rest.
Prediction classical_freq_tuned(const OracleInput& in);

/// Mass tuning with particle-2 ground-state noise; SNR is 0 at t = 0.
Prediction quantum_mass_tuned(const OracleInput& in);

/// Frequency tuning with particle-2 noise; SNR is 0 at t = 0.
Prediction quantum_freq_tuned(const OracleInput& in);

struct IdentityCheck {
    std::string name;
    double residual = 0.0;  ///< relative difference between the two sides
};

/// Algebraic reductions between the formulas: small-angle frequency tuning to
/// mass tuning, quantum to classical with a noiseless particle 2, and the
/// heuristic drift to the mass-tuned mean.
std::vector<IdentityCheck> identity_suite();

/// Monte Carlo SNR of z^2 for z ~ N(0, 1). Requires n >= 1e4.
double snr_quadratic_bound(std::size_t n, RandomStream& rng);

}  // namespace cnl::oracle
