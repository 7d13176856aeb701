#include "cnl/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "cnl/integrator.hpp"
#include "cnl/rng.hpp"

namespace cnl {

namespace {

constexpr std::size_t kChunk = 64;

/// Runs body(i) for i in [0, n) on `workers` threads. Output slots are
/// indexed by i, so the result does not depend on scheduling.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
    if (workers <= 1 || n <= kChunk) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        try {
            for (;;) {
                const std::size_t begin = next.fetch_add(kChunk);
                if (begin >= n) break;
                const std::size_t end = std::min(n, begin + kChunk);
                for (std::size_t i = begin; i < end; ++i) body(i);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(n);
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

double quantile(std::vector<double>& values, double q) {
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

double sample_std(const std::vector<double>& values) {
    if (values.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace

std::string_view to_string(CensorPolicy policy) {
    return policy == CensorPolicy::ExcludeAfterCensor ? "exclude-after-censor" : "drop-censored";
}

CensorPolicy censor_policy_from_string(std::string_view name) {
    if (name == "exclude-after-censor") return CensorPolicy::ExcludeAfterCensor;
    if (name == "drop-censored") return CensorPolicy::DropCensoredEntirely;
    throw ConfigError(
        fmt::format("unknown censor policy '{}' (expected exclude-after-censor, drop-censored)", name));
}

void EnsembleConfig::validate() const {
    if (n_trajectories < 2) throw ConfigError("ensemble needs at least 2 trajectories");
    if (output_times.empty()) throw ConfigError("output schedule must not be empty");
    for (std::size_t k = 0; k < output_times.size(); ++k) {
        if (!std::isfinite(output_times[k]) || output_times[k] < 0.0 ||
            (k > 0 && output_times[k] <= output_times[k - 1]))
            throw ConfigError("output times must be finite, >= 0 and strictly increasing");
    }
    if (!(band_low >= 0.0 && band_low < band_high && band_high <= 1.0))
        throw ConfigError("bootstrap band quantiles must satisfy 0 <= low < high <= 1");
}

SampleMatrix::SampleMatrix(std::vector<double> times, std::size_t n_trajectories)
    : times_(std::move(times)),
      n_traj_(n_trajectories),
      data_(times_.size() * 4 * n_trajectories, std::numeric_limits<double>::quiet_NaN()),
      alive_len_(n_trajectories, 0),
      censor_time_(n_trajectories) {}

std::size_t SampleMatrix::censored_count() const {
    return static_cast<std::size_t>(
        std::count_if(censor_time_.begin(), censor_time_.end(), [](const auto& t) { return t.has_value(); }));
}

unsigned resolve_workers(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CNL_WORKERS")) {
        char* end = nullptr;
        const long value = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && value > 0) return static_cast<unsigned>(value);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SampleMatrix simulate_ensemble(const SystemConfig& system, const std::array<GaussianState, 2>& states,
                               const EnsembleConfig& ens, RunMetadata* metadata) {
    system.validate();
    ens.validate();
    for (const auto& s : states) s.validate();

    const UnitScales scales = make_unit_scales(system);
    const auto integrator = LangevinIntegrator::from_config(system, scales);
    const double dt = system.integration.dt > 0.0 ? scales.to_internal(Time{system.integration.dt})
                                                  : integrator.default_dt();
    integrator.check_dt(dt);

    std::vector<double> schedule;
    schedule.reserve(ens.output_times.size());
    for (double t : ens.output_times) schedule.push_back(scales.to_internal(Time{t}));

    const unsigned workers = resolve_workers(ens.workers);
    if (metadata) {
        metadata->seed = ens.master_seed;
        metadata->dt_internal = dt;
        metadata->dt_seconds = scales.from_internal<Time>(dt).value;
        metadata->scheme = std::string(to_string(integrator.scheme()));
        metadata->z_cutoff_m = scales.from_internal<Length>(integrator.z_cutoff()).value;
        metadata->n_trajectories = ens.n_trajectories;
        metadata->bootstrap_resamples = ens.bootstrap_resamples;
        metadata->censor_policy = ens.censor_policy;
        metadata->workers = workers;
        metadata->cubic_coupling = cubic_coupling(system);
    }

    SampleMatrix out(ens.output_times, ens.n_trajectories);
    const double p_scale = scales.momentum();
    const double z_scale = scales.length();

    parallel_for(ens.n_trajectories, workers, [&](std::size_t j) {
        RandomStream rng(ens.master_seed, stream_domain::trajectory + j);
        const auto s1 = sample_one(states[0], rng);
        const auto s2 = sample_one(states[1], rng);
        PhasePoint x0;
        x0.z1 = s1.z / z_scale;
        x0.p1 = s1.p / p_scale;
        x0.z2 = s2.z / z_scale;
        x0.p2 = s2.p / p_scale;
        x0.t = 0.0;
        const auto record = integrator.integrate(x0, schedule, dt, rng);
        const std::size_t n = record.censored ? record.samples.size() : schedule.size();
        for (std::size_t k = 0; k < n; ++k) {
            const auto& x = record.samples[k];
            out.at(k, kZ1, j) = x.z1 * z_scale;
            out.at(k, kP1, j) = x.p1 * p_scale;
            out.at(k, kZ2, j) = x.z2 * z_scale;
            out.at(k, kP2, j) = x.p2 * p_scale;
        }
        out.set_alive_length(j, n);
        if (record.censored) out.set_censor_time(j, scales.from_internal<Time>(*record.censor_time).value);
    });
    return out;
}

MomentSeries reduce_samples(const SampleMatrix& samples, const EnsembleConfig& ens) {
    const std::size_t n_traj = samples.n_trajectories();
    const std::size_t n_times = samples.n_times();
    const bool drop = ens.censor_policy == CensorPolicy::DropCensoredEntirely;

    // Trajectories eligible for statistics and the number of rows each contributes.
    std::vector<std::size_t> pool;
    std::vector<std::size_t> alive(n_traj, 0);
    for (std::size_t j = 0; j < n_traj; ++j) {
        if (drop && samples.censor_time(j)) continue;
        alive[j] = samples.alive_length(j);
        pool.push_back(j);
    }

    MomentSeries series;
    series.n_trajectories = n_traj;
    series.n_censored = samples.censored_count();

    std::vector<std::size_t> n_alive(n_times, 0);
    for (std::size_t j : pool)
        for (std::size_t k = 0; k < alive[j]; ++k) ++n_alive[k];

    std::size_t n_rows = n_times;
    for (std::size_t k = 0; k < n_times; ++k) {
        if (n_alive[k] == 0) {
            n_rows = k;
            series.status = SeriesStatus::TruncatedAllCensored;
            break;
        }
    }

    // Point estimates, summed in trajectory order.
    series.rows.resize(n_rows);
    for (std::size_t k = 0; k < n_rows; ++k) {
        auto& row = series.rows[k];
        row.t = samples.times()[k];
        row.n_alive = n_alive[k];
        const double n = static_cast<double>(n_alive[k]);
        for (std::size_t v = 0; v < 4; ++v) {
            const auto col = samples.column(k, static_cast<Variable>(v));
            double sum = 0.0;
            for (std::size_t j : pool)
                if (k < alive[j]) sum += col[j];
            const double mean = sum / n;
            double ss = 0.0;
            for (std::size_t j : pool)
                if (k < alive[j]) ss += (col[j] - mean) * (col[j] - mean);
            auto& st = row.stats[v];
            st.mean = mean;
            st.std = n_alive[k] >= 2 ? std::sqrt(ss / (n - 1.0)) : 0.0;
            st.se = n_alive[k] >= 2 ? st.std / std::sqrt(n) : 0.0;
        }
        const auto& p2 = row.stats[kP2];
        if (n_alive[k] >= 2 && p2.std > 0.0) row.snr = p2.mean / p2.std;
    }
    if (n_rows > 0)
        for (std::size_t v = 0; v < 4; ++v) series.initial_std[v] = series.rows[0].stats[v].std;

    const std::size_t n_boot = ens.bootstrap_resamples;
    if (n_boot > 0 && n_rows > 0 && !pool.empty()) {
        const unsigned workers = resolve_workers(ens.workers);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        // rep_mean[(r * n_rows + k) * 4 + v], rep_snr[r * n_rows + k]
        std::vector<double> rep_mean(n_boot * n_rows * 4, nan);
        std::vector<double> rep_snr(n_boot * n_rows, nan);
        std::vector<bool> all_alive(n_rows);
        for (std::size_t k = 0; k < n_rows; ++k) all_alive[k] = pool.size() == n_traj && n_alive[k] == n_traj;

        parallel_for(n_boot, workers, [&](std::size_t r) {
            RandomStream rng(ens.master_seed, stream_domain::bootstrap + r);
            std::vector<double> weight(n_traj, 0.0);
            for (std::size_t draw = 0; draw < pool.size(); ++draw) weight[pool[rng.below(pool.size())]] += 1.0;
            for (std::size_t k = 0; k < n_rows; ++k) {
                double wsum = 0.0;
                if (all_alive[k]) {
                    wsum = static_cast<double>(pool.size());
                } else {
                    for (std::size_t j : pool)
                        if (k < alive[j]) wsum += weight[j];
                }
                if (wsum < 1.0) continue;
                for (std::size_t v = 0; v < 4; ++v) {
                    const auto col = samples.column(k, static_cast<Variable>(v));
                    const double centre = series.rows[k].stats[v].mean;
                    double s = 0.0;
                    double q = 0.0;
                    if (all_alive[k]) {
                        for (std::size_t j = 0; j < n_traj; ++j) {
                            const double x = col[j] - centre;
                            s += weight[j] * x;
                            q += weight[j] * x * x;
                        }
                    } else {
                        for (std::size_t j : pool) {
                            if (k >= alive[j]) continue;
                            const double x = col[j] - centre;
                            s += weight[j] * x;
                            q += weight[j] * x * x;
                        }
                    }
                    const double mean = centre + s / wsum;
                    rep_mean[(r * n_rows + k) * 4 + v] = mean;
                    if (v == kP2 && wsum >= 2.0) {
                        const double var = (q - s * s / wsum) / (wsum - 1.0);
                        if (var > 0.0) rep_snr[r * n_rows + k] = mean / std::sqrt(var);
                    }
                }
            }
        });

        std::vector<double> buf;
        buf.reserve(n_boot);
        for (std::size_t k = 0; k < n_rows; ++k) {
            auto& row = series.rows[k];
            for (std::size_t v = 0; v < 4; ++v) {
                buf.clear();
                for (std::size_t r = 0; r < n_boot; ++r) {
                    const double m = rep_mean[(r * n_rows + k) * 4 + v];
                    if (!std::isnan(m)) buf.push_back(m);
                }
                row.stats[v].se = sample_std(buf);
            }
            if (!row.snr) continue;
            buf.clear();
            for (std::size_t r = 0; r < n_boot; ++r) {
                const double s = rep_snr[r * n_rows + k];
                if (!std::isnan(s)) buf.push_back(s);
            }
            if (buf.size() >= 2) {
                row.snr_se = sample_std(buf);
                row.snr_low = quantile(buf, ens.band_low);
                row.snr_high = quantile(buf, ens.band_high);
            }
        }
    }
    return series;
}

MomentSeries run_ensemble(const SystemConfig& system, const std::array<GaussianState, 2>& states,
                          const EnsembleConfig& ens) {
    RunMetadata meta;
    const auto samples = simulate_ensemble(system, states, ens, &meta);
    auto series = reduce_samples(samples, ens);
    series.metadata = meta;
    return series;
}

std::vector<SnrPoint> snr_series(const MomentSeries& series) {
    std::vector<SnrPoint> out;
    out.reserve(series.rows.size());
    for (const auto& row : series.rows) out.push_back({row.t, row.snr, row.snr_low, row.snr_high});
    return out;
}

Crossing target_crossing(const MomentSeries& series, double target, double tol) {
    if (!(target > 0.0)) throw ConfigError("SNR target must be > 0");
    Crossing result;
    const double threshold = target * (1.0 - tol);
    const MomentRow* best = nullptr;
    for (const auto& row : series.rows) {
        if (!row.snr) continue;
        if (*row.snr >= threshold) {
            best = &row;
            result.crossed = true;
            break;
        }
        if (!best || *row.snr > *best->snr) best = &row;
    }
    if (!best) return result;
    result.defined = true;
    result.t_star = best->t;
    result.p_at = best->stats[kP2].mean;
    result.sigma_at = best->stats[kP2].std;
    result.snr_at = *best->snr;
    return result;
}

}  // namespace cnl
