#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "cnl/ensemble.hpp"
#include "cnl/scenario.hpp"

namespace cnl {

// Emitters never write NaN or inf: undefined values become an empty CSV field
// (JSON null) next to an explicit flag column.

/// Columns: t, n_alive, per variable mean/std/se, snr_p2 with bootstrap band,
/// snr_defined, then every mean and std normalised by the initial std.
std::string moments_csv(const MomentSeries& series);
std::string moments_json(const MomentSeries& series);

/// Columns: value, crossed, t_star, p_at, sigma_at, snr_at, censored_fraction, status.
std::string sweep_csv(const SweepResult& sweep);
std::string sweep_json(const SweepResult& sweep);

/// Columns: t, mean_p2, snr, status.
std::string oracle_csv(const OracleTable& table);
std::string oracle_json(const OracleTable& table);

/// One row per trajectory and output time.
std::string raw_samples_csv(const SampleMatrix& samples);

/// Fixed-width scientific text used by every emitter.
std::string format_value(double value);

void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace cnl
