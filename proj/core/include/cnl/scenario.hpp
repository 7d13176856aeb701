#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cnl/config.hpp"
#include "cnl/ensemble.hpp"
#include "cnl/state_prep.hpp"
#include "cnl/units.hpp"

namespace cnl {

inline constexpr std::array<std::string_view, 6> kScenarioNames{
    "fig1b-classical", "fig1b-quantum", "fig2-trajectories", "fig3-classical-sweep", "fig3-quantum-sweep", "custom"};

/// Layer applied on top of the defaults for a named scenario.
ParameterSet scenario_preset(std::string_view scenario);

/// Layer applied for a regime: m1 = 8e-16 kg (mass-tuned) or w1 = 2.5e6 rad/s (freq-tuned).
ParameterSet regime_preset(Regime regime);

/// Inputs to configuration resolution. Precedence, lowest first:
/// defaults < scenario preset < regime preset < config file < command line.
struct RunRequest {
    std::string scenario = "custom";
    ParameterSet file_layer;
    ParameterSet cli_layer;
};

/// Fully built run for one regime.
struct ResolvedRun {
    std::string scenario;
    Regime regime = Regime::Symmetric;
    bool quantum = false;
    SystemConfig system;
    std::array<GaussianState, 2> states{};
    EnsembleConfig ensemble;
    ParameterSet effective;
};

/// One resolved run per regime ("regime=all" expands to the three regimes).
std::vector<ResolvedRun> resolve_runs(const RunRequest& request);

/// Builds a run from a complete parameter set.
ResolvedRun build_run(std::string scenario, const ParameterSet& effective);

/// Output times 0, t_end/n, ..., t_end.
std::vector<double> uniform_schedule(double t_end, std::size_t intervals);

struct SweepRow {
    double value = 0.0;
    bool ok = true;
    std::string status = "ok";
    Crossing crossing;
    double censored_fraction = 0.0;
};

struct SweepResult {
    std::string parameter;
    Regime regime = Regime::Symmetric;
    double target = 0.0;
    std::vector<SweepRow> rows;
};

/// Grid from sweep.values or sweep.min/max/points/spacing; strictly increasing.
std::vector<double> sweep_grid(const ParameterSet& params);

/// Re-resolves `base` with `parameter` set to each grid value and records the
/// target crossing. A failing point is recorded and the sweep continues.
SweepResult run_sweep(const ResolvedRun& base, std::string_view parameter, std::span<const double> grid,
                      double target, double tol);

struct OracleRow {
    double t = 0.0;
    double mean_p2 = 0.0;
    double snr = 0.0;
};

struct OracleTable {
    bool available = false;
    std::string model;   ///< e.g. "classical-mass-tuned", or "none"
    std::string status;  ///< "ok" or "no oracle for regime ..."
    std::vector<OracleRow> rows;
};

OracleTable oracle_table(const ResolvedRun& run, std::span<const double> times);

enum class OutputFormat { Csv, Json };

struct RunSummary {
    std::vector<std::filesystem::path> files;
    bool all_censored = false;
};

/// Runs every regime of the request, writes one moments file per regime plus
/// manifest.json into `out_dir`.
RunSummary run_scenario(const RunRequest& request, const std::filesystem::path& out_dir, OutputFormat format,
                        bool dump_raw = false);

/// Sweep driver: one sweep file per regime plus manifest.json.
RunSummary run_sweep_scenario(const RunRequest& request, const std::filesystem::path& out_dir,
                              OutputFormat format);

/// Oracle predictions at the run's output times, one file per regime.
RunSummary run_oracle_scenario(const RunRequest& request, const std::filesystem::path& out_dir,
                               OutputFormat format);

}  // namespace cnl
