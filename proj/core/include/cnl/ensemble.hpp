#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cnl/state_prep.hpp"
#include "cnl/units.hpp"

namespace cnl {

enum class CensorPolicy { ExcludeAfterCensor, DropCensoredEntirely };

std::string_view to_string(CensorPolicy policy);
CensorPolicy censor_policy_from_string(std::string_view name);

/// Index of the tracked phase-space variables.
enum Variable : std::size_t { kZ1 = 0, kP1 = 1, kZ2 = 2, kP2 = 3 };
inline constexpr std::array<std::string_view, 4> kVariableNames{"z1", "p1", "z2", "p2"};

struct EnsembleConfig {
    std::size_t n_trajectories = 10000;
    std::uint64_t master_seed = 1;
    /// Seconds, strictly increasing, >= 0.
    std::vector<double> output_times;
    CensorPolicy censor_policy = CensorPolicy::ExcludeAfterCensor;
    /// Zero falls back to std/sqrt(n) standard errors and no SNR band.
    std::size_t bootstrap_resamples = 1000;
    double band_low = 0.16;
    double band_high = 0.84;
    /// Zero: CNL_WORKERS if set, otherwise hardware concurrency.
    unsigned workers = 0;

    void validate() const;
};

struct RunMetadata {
    std::uint64_t seed = 0;
    double dt_seconds = 0.0;
    double dt_internal = 0.0;
    std::string scheme;
    double z_cutoff_m = 0.0;
    std::size_t n_trajectories = 0;
    std::size_t bootstrap_resamples = 0;
    CensorPolicy censor_policy = CensorPolicy::ExcludeAfterCensor;
    unsigned workers = 1;
    double cubic_coupling = 0.0;
};

/// Per-trajectory samples in SI units.
///
/// Layout is [time][variable][trajectory]. A trajectory contributes to time k
/// only while k < alive_length(j).
class SampleMatrix {
public:
    SampleMatrix(std::vector<double> times, std::size_t n_trajectories);

    std::size_t n_times() const { return times_.size(); }
    std::size_t n_trajectories() const { return n_traj_; }
    const std::vector<double>& times() const { return times_; }

    double& at(std::size_t time, Variable v, std::size_t traj) {
        return data_[(time * 4 + v) * n_traj_ + traj];
    }
    double at(std::size_t time, Variable v, std::size_t traj) const {
        return data_[(time * 4 + v) * n_traj_ + traj];
    }
    std::span<const double> column(std::size_t time, Variable v) const {
        return {data_.data() + (time * 4 + v) * n_traj_, n_traj_};
    }

    std::size_t alive_length(std::size_t traj) const { return alive_len_[traj]; }
    void set_alive_length(std::size_t traj, std::size_t len) { alive_len_[traj] = len; }
    std::optional<double> censor_time(std::size_t traj) const { return censor_time_[traj]; }
    void set_censor_time(std::size_t traj, std::optional<double> t) { censor_time_[traj] = t; }

    std::size_t censored_count() const;

private:
    std::vector<double> times_;
    std::size_t n_traj_;
    std::vector<double> data_;
    std::vector<std::size_t> alive_len_;
    std::vector<std::optional<double>> censor_time_;
};

struct MomentStats {
    double mean = 0.0;
    double std = 0.0;
    double se = 0.0;
};

struct MomentRow {
    double t = 0.0;
    std::size_t n_alive = 0;
    std::array<MomentStats, 4> stats{};
    /// SNR of p2; empty where std = 0 or fewer than two trajectories survive.
    std::optional<double> snr;
    std::optional<double> snr_low;
    std::optional<double> snr_high;
    std::optional<double> snr_se;
};

enum class SeriesStatus { Complete, TruncatedAllCensored };

struct MomentSeries {
    std::vector<MomentRow> rows;
    std::array<double, 4> initial_std{};
    std::size_t n_trajectories = 0;
    std::size_t n_censored = 0;
    SeriesStatus status = SeriesStatus::Complete;
    RunMetadata metadata;

    double censored_fraction() const {
        return n_trajectories ? static_cast<double>(n_censored) / static_cast<double>(n_trajectories) : 0.0;
    }
};

unsigned resolve_workers(unsigned requested);

/// Integrates every trajectory. Trajectory j draws from stream j of the master
/// seed, so the matrix does not depend on the worker count.
SampleMatrix simulate_ensemble(const SystemConfig& system, const std::array<GaussianState, 2>& states,
                               const EnsembleConfig& ens, RunMetadata* metadata = nullptr);

/// Time-resolved means, standard deviations, bootstrap errors and SNR of p2.
MomentSeries reduce_samples(const SampleMatrix& samples, const EnsembleConfig& ens);

MomentSeries run_ensemble(const SystemConfig& system, const std::array<GaussianState, 2>& states,
                          const EnsembleConfig& ens);

struct SnrPoint {
    double t = 0.0;
    std::optional<double> snr;
    std::optional<double> low;
    std::optional<double> high;
};

std::vector<SnrPoint> snr_series(const MomentSeries& series);

struct Crossing {
    bool crossed = false;
    double t_star = 0.0;
    double p_at = 0.0;
    double sigma_at = 0.0;
    double snr_at = 0.0;
    bool defined = false;  ///< false when no row has a defined SNR
};

/// First time SNR >= target (1 - tol); otherwise the row of maximal SNR with
/// crossed = false.
Crossing target_crossing(const MomentSeries& series, double target, double tol = 0.01);

}  // namespace cnl
