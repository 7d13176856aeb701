#include "cnl/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

#include "cnl/integrator.hpp"
#include "cnl/oracle.hpp"
#include "cnl/output.hpp"

#ifndef CNL_VERSION
#define CNL_VERSION "unknown"
#endif

namespace cnl {

namespace {

constexpr std::array<Regime, 3> kAllRegimes{Regime::Symmetric, Regime::MassTuned, Regime::FrequencyTuned};

ParameterSet layer(std::initializer_list<std::pair<std::string_view, std::string_view>> entries) {
    ParameterSet out;
    for (const auto& [k, v] : entries) out.set(k, std::string(v));
    return out;
}

// Quantum runs: no bath noise, weak damping on particle 2 only, particle 1
// squeezed to 0.01 nm, particle 2 in its ground state.
ParameterSet quantum_layer() {
    return layer({{"quantum", "1"},
                  {"integrator.thermal_noise", "0"},
                  {"particle1.gamma", "0"},
                  {"state1.kind", "squeezed"},
                  {"state1.sigma_z", "1e-11"},
                  {"state2.kind", "ground"},
                  {"ensemble.t_end", "5e-06"}});
}

ParticleParams particle_from(const ParameterSet& p, std::string_view prefix) {
    ParticleParams out;
    out.mass = p.number(fmt::format("{}.mass", prefix));
    out.trap_omega = p.number(fmt::format("{}.omega", prefix));
    out.charge = p.number(fmt::format("{}.charge", prefix));
    out.damping_rate = p.number(fmt::format("{}.gamma", prefix));
    out.bath_temperature = p.number(fmt::format("{}.bath_temperature", prefix));
    out.validate();
    return out;
}

GaussianState state_from(const ParameterSet& p, std::string_view prefix, const ParticleParams& particle,
                         bool quantum) {
    const auto key = [&](std::string_view name) { return fmt::format("{}.{}", prefix, name); };
    const std::string kind = p.text(key("kind"));
    const double temperature = p.number(key("temperature"));
    const double sigma_z = p.number(key("sigma_z"));

    GaussianState s;
    if (kind == "thermal") {
        s = thermal_state(particle, temperature, quantum);
    } else if (kind == "thermal-squeezed") {
        s = thermally_squeezed_state(particle, temperature, sigma_z);
    } else if (kind == "ground") {
        s = quantum_ground_state(particle);
    } else if (kind == "squeezed") {
        const double xi = p.number(key("xi"));
        s = apply_squeeze(quantum_ground_state(particle), xi > 0.0 ? xi : squeeze_factor_for(particle, sigma_z));
    } else if (kind == "gaussian") {
        s = custom_state(0.0, 0.0, sigma_z, p.number(key("sigma_p")));
    } else {
        throw ConfigError(fmt::format("{}.kind '{}' is not one of thermal, thermal-squeezed, ground, squeezed, gaussian",
                                      prefix, kind));
    }

    const double ff = p.number(key("freefall_sigma_z"));
    if (ff > 0.0) s = freefall_amplify(s, freefall_time_for(s, ff, particle.mass), particle.mass);

    s.mean_z += p.number(key("mean_z"));
    s.mean_p += p.number(key("mean_p"));
    s.validate();
    return s;
}

std::vector<Regime> requested_regimes(const std::string& name) {
    if (name == "all") return {kAllRegimes.begin(), kAllRegimes.end()};
    return {regime_from_string(name)};
}

std::string file_stem(const ResolvedRun& run) { return std::string(to_string(run.regime)); }

const char* extension(OutputFormat format) { return format == OutputFormat::Csv ? "csv" : "json"; }

nlohmann::json effective_json(const ParameterSet& p) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [k, v] : p.entries()) out[k] = v;
    return out;
}

void write_manifest(const std::filesystem::path& out_dir, const std::string& command, const std::string& scenario,
                    nlohmann::json runs, const RunSummary& summary) {
    nlohmann::json doc;
    doc["command"] = command;
    doc["scenario"] = scenario;
    doc["version"] = CNL_VERSION;
    doc["runs"] = std::move(runs);
    nlohmann::json files = nlohmann::json::array();
    for (const auto& f : summary.files) files.push_back(f.filename().string());
    doc["files"] = std::move(files);
    write_text_file(out_dir / "manifest.json", doc.dump(2) + "\n");
}

nlohmann::json run_entry(const ResolvedRun& run, const RunMetadata& meta, double censored_fraction,
                         double wall_seconds, const std::string& file) {
    nlohmann::json r;
    r["regime"] = std::string(to_string(run.regime));
    r["quantum"] = run.quantum;
    r["seed"] = meta.seed;
    r["scheme"] = meta.scheme;
    r["dt_s"] = meta.dt_seconds;
    r["dt_internal"] = meta.dt_internal;
    r["z_cutoff_m"] = meta.z_cutoff_m;
    r["cubic_coupling"] = meta.cubic_coupling;
    r["n_trajectories"] = meta.n_trajectories;
    r["bootstrap_resamples"] = meta.bootstrap_resamples;
    r["censor_policy"] = std::string(to_string(meta.censor_policy));
    r["censored_fraction"] = censored_fraction;
    r["wall_clock_s"] = wall_seconds;
    r["file"] = file;
    r["config"] = effective_json(run.effective);
    return r;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

ParameterSet scenario_preset(std::string_view scenario) {
    if (scenario == "fig1b-classical") return layer({{"regime", "all"}, {"ensemble.t_end", "2e-05"}});
    if (scenario == "fig1b-quantum") {
        auto p = quantum_layer();
        p.set("regime", "all");
        return p;
    }
    if (scenario == "fig2-trajectories")
        return layer({{"regime", "all"}, {"ensemble.t_end", "2e-05"}, {"ensemble.n_outputs", "200"}});
    if (scenario == "fig3-classical-sweep")
        return layer({{"regime", "all"},
                      {"ensemble.n_outputs", "200"},
                      {"ensemble.bootstrap", "0"},
                      {"sweep.parameter", "state1.sigma_z"},
                      {"sweep.min", "1e-08"},
                      {"sweep.max", "2e-07"},
                      {"sweep.points", "16"}});
    if (scenario == "fig3-quantum-sweep") {
        auto p = quantum_layer();
        p.merge(layer({{"regime", "all"},
                       {"ensemble.n_outputs", "200"},
                       {"ensemble.bootstrap", "0"},
                       {"sweep.parameter", "state1.freefall_sigma_z"},
                       {"sweep.min", "1e-11"},
                       {"sweep.max", "1e-10"},
                       {"sweep.points", "16"}}));
        return p;
    }
    if (scenario == "custom") return {};
    std::string names;
    for (auto n : kScenarioNames) names += fmt::format("{}{}", names.empty() ? "" : ", ", n);
    throw ConfigError(fmt::format("unknown scenario '{}'; valid scenarios: {}", scenario, names));
}

ParameterSet regime_preset(Regime regime) {
    switch (regime) {
    case Regime::MassTuned: return layer({{"particle1.mass", "8e-16"}});
    case Regime::FrequencyTuned: return layer({{"particle1.omega", "2500000"}});
    case Regime::Symmetric:
    case Regime::Custom: break;
    }
    return {};
}

std::vector<ResolvedRun> resolve_runs(const RunRequest& request) {
    const ParameterSet preset = scenario_preset(request.scenario);

    ParameterSet probe = default_parameters();
    probe.merge(preset);
    probe.merge(request.file_layer);
    probe.merge(request.cli_layer);

    std::vector<ResolvedRun> runs;
    for (Regime r : requested_regimes(probe.text("regime"))) {
        ParameterSet p = default_parameters();
        p.merge(preset);
        p.merge(regime_preset(r));
        p.merge(request.file_layer);
        p.merge(request.cli_layer);
        p.set("regime", std::string(to_string(r)));
        runs.push_back(build_run(request.scenario, p));
    }
    return runs;
}

ResolvedRun build_run(std::string scenario, const ParameterSet& effective) {
    ResolvedRun run;
    run.scenario = std::move(scenario);
    run.effective = effective;
    const auto& p = effective;

    run.regime = regime_from_string(p.text("regime"));
    run.quantum = p.flag("quantum");

    auto& sys = run.system;
    sys.particles[0] = particle_from(p, "particle1");
    sys.particles[1] = particle_from(p, "particle2");
    sys.coupling.kappa = p.flag("coupling.kappa_from_charges")
                             ? charge_to_kappa(sys.particles[0].charge, sys.particles[1].charge)
                             : p.number("coupling.kappa");
    sys.coupling.separation = p.number("coupling.d");
    sys.coupling.mode = force_mode_from_string(p.text("coupling.mode"));
    sys.coupling.compensation_residual = p.number("coupling.residual");
    sys.coupling.min_separation_fraction = p.number("coupling.min_separation");
    sys.regime = run.regime;
    sys.integration.dt = p.number("integrator.dt");
    sys.integration.z_cutoff = p.number("integrator.z_cutoff");
    sys.integration.scheme = scheme_from_string(p.text("integrator.scheme"));
    sys.integration.thermal_noise = p.flag("integrator.thermal_noise") && !run.quantum;
    sys.validate();

    run.states[0] = state_from(p, "state1", sys.particles[0], run.quantum);
    run.states[1] = state_from(p, "state2", sys.particles[1], run.quantum);

    auto& ens = run.ensemble;
    ens.n_trajectories = p.integer("ensemble.n_trajectories");
    ens.master_seed = p.integer("ensemble.seed");
    const auto n_out = p.integer("ensemble.n_outputs");
    if (n_out == 0) throw ConfigError("ensemble.n_outputs must be >= 1");
    ens.output_times = uniform_schedule(p.number("ensemble.t_end"), n_out);
    ens.censor_policy = censor_policy_from_string(p.text("ensemble.censor_policy"));
    ens.bootstrap_resamples = p.integer("ensemble.bootstrap");
    ens.workers = static_cast<unsigned>(p.integer("ensemble.workers"));
    ens.validate();
    return run;
}

std::vector<double> uniform_schedule(double t_end, std::size_t intervals) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError(fmt::format("t_end must be > 0, got {}", t_end));
    if (intervals == 0) throw ConfigError("schedule needs at least one interval");
    std::vector<double> out(intervals + 1);
    for (std::size_t k = 0; k <= intervals; ++k)
        out[k] = t_end * static_cast<double>(k) / static_cast<double>(intervals);
    return out;
}

std::vector<double> sweep_grid(const ParameterSet& params) {
    std::vector<double> grid;
    const std::string explicit_values = params.text("sweep.values");
    if (!explicit_values.empty()) {
        std::size_t pos = 0;
        while (pos <= explicit_values.size()) {
            const auto comma = std::min(explicit_values.find(',', pos), explicit_values.size());
            ParameterSet one;
            one.set("sweep.min", explicit_values.substr(pos, comma - pos));
            grid.push_back(one.number("sweep.min"));
            pos = comma + 1;
        }
    } else {
        const double lo = params.number("sweep.min");
        const double hi = params.number("sweep.max");
        const auto n = params.integer("sweep.points");
        const std::string spacing = params.text("sweep.spacing");
        if (n == 0) throw ConfigError("sweep.points must be >= 1");
        if (spacing != "log" && spacing != "linear")
            throw ConfigError(fmt::format("sweep.spacing '{}' is not log or linear", spacing));
        if (spacing == "log" && !(lo > 0.0)) throw ConfigError("log-spaced sweep needs sweep.min > 0");
        if (n == 1) {
            grid.push_back(lo);
        } else {
            for (std::uint64_t k = 0; k < n; ++k) {
                const double f = static_cast<double>(k) / static_cast<double>(n - 1);
                grid.push_back(spacing == "log" ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f);
            }
            grid.back() = hi;
        }
    }
    if (grid.empty()) throw ConfigError("sweep grid is empty");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw ConfigError("sweep grid must be strictly increasing");
    return grid;
}

SweepResult run_sweep(const ResolvedRun& base, std::string_view parameter, std::span<const double> grid,
                      double target, double tol) {
    if (!is_known_key(parameter) || parameter.starts_with("sweep.") || parameter == "regime")
        throw ConfigError(fmt::format("'{}' cannot be swept", parameter));
    if (grid.empty()) throw ConfigError("sweep grid is empty");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw ConfigError("sweep grid must be strictly increasing");

    SweepResult result;
    result.parameter = std::string(parameter);
    result.regime = base.regime;
    result.target = target;
    for (double value : grid) {
        SweepRow row;
        row.value = value;
        try {
            ParameterSet p = base.effective;
            p.set(parameter, format_number(value));
            const auto run = build_run(base.scenario, p);
            const auto series = run_ensemble(run.system, run.states, run.ensemble);
            row.censored_fraction = series.censored_fraction();
            row.crossing = target_crossing(series, target, tol);
            if (!row.crossing.defined) {
                row.ok = false;
                row.status = "snr undefined";
            } else if (series.status == SeriesStatus::TruncatedAllCensored) {
                row.status = "truncated-all-censored";
            }
        } catch (const std::exception& e) {
            row.ok = false;
            row.status = e.what();
        }
        result.rows.push_back(std::move(row));
    }
    return result;
}

OracleTable oracle_table(const ResolvedRun& run, std::span<const double> times) {
    OracleTable table;
    using Fn = oracle::Prediction (*)(const oracle::OracleInput&);
    Fn fn = nullptr;
    if (run.regime == Regime::MassTuned) {
        fn = run.quantum ? oracle::quantum_mass_tuned : oracle::classical_mass_tuned;
        table.model = run.quantum ? "quantum-mass-tuned" : "classical-mass-tuned";
    } else if (run.regime == Regime::FrequencyTuned) {
        fn = run.quantum ? oracle::quantum_freq_tuned : oracle::classical_freq_tuned;
        table.model = run.quantum ? "quantum-freq-tuned" : "classical-freq-tuned";
    }
    if (!fn) {
        table.model = "none";
        table.status = fmt::format("no oracle for regime {}", to_string(run.regime));
        return table;
    }
    table.available = true;
    table.status = "ok";
    for (double t : times) {
        const auto pred = fn(oracle::make_input(run.system, run.states, t));
        table.rows.push_back({t, pred.mean_p2, pred.snr});
    }
    return table;
}

RunSummary run_scenario(const RunRequest& request, const std::filesystem::path& out_dir, OutputFormat format,
                        bool dump_raw) {
    const auto runs = resolve_runs(request);
    std::filesystem::create_directories(out_dir);

    RunSummary summary;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& run : runs) {
        const auto start = std::chrono::steady_clock::now();
        RunMetadata meta;
        const auto samples = simulate_ensemble(run.system, run.states, run.ensemble, &meta);
        auto series = reduce_samples(samples, run.ensemble);
        series.metadata = meta;
        const double wall = seconds_since(start);

        const auto path = out_dir / fmt::format("moments_{}.{}", file_stem(run), extension(format));
        write_text_file(path, format == OutputFormat::Csv ? moments_csv(series) : moments_json(series));
        summary.files.push_back(path);
        if (dump_raw) {
            const auto raw = out_dir / fmt::format("samples_{}.csv", file_stem(run));
            write_text_file(raw, raw_samples_csv(samples));
            summary.files.push_back(raw);
        }
        if (series.n_censored == series.n_trajectories) summary.all_censored = true;
        entries.push_back(run_entry(run, meta, series.censored_fraction(), wall, path.filename().string()));
    }
    write_manifest(out_dir, "run", request.scenario, std::move(entries), summary);
    return summary;
}

RunSummary run_sweep_scenario(const RunRequest& request, const std::filesystem::path& out_dir,
                              OutputFormat format) {
    const auto runs = resolve_runs(request);
    std::filesystem::create_directories(out_dir);

    RunSummary summary;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& run : runs) {
        const auto start = std::chrono::steady_clock::now();
        const auto& p = run.effective;
        const auto grid = sweep_grid(p);
        const auto sweep =
            run_sweep(run, p.text("sweep.parameter"), grid, p.number("sweep.target"), p.number("sweep.tol"));
        const double wall = seconds_since(start);

        const auto path = out_dir / fmt::format("sweep_{}.{}", file_stem(run), extension(format));
        write_text_file(path, format == OutputFormat::Csv ? sweep_csv(sweep) : sweep_json(sweep));
        summary.files.push_back(path);

        // Metadata of the base point; every grid point shares seed, scheme and step.
        RunMetadata meta;
        meta.seed = run.ensemble.master_seed;
        meta.scheme = std::string(to_string(run.system.integration.scheme));
        const auto scales = make_unit_scales(run.system);
        meta.dt_internal = run.system.integration.dt > 0.0
                               ? scales.to_internal(Time{run.system.integration.dt})
                               : LangevinIntegrator::from_config(run.system, scales).default_dt();
        meta.dt_seconds = scales.from_internal<Time>(meta.dt_internal).value;
        meta.z_cutoff_m = run.system.integration.z_cutoff * run.system.coupling.separation;
        meta.n_trajectories = run.ensemble.n_trajectories;
        meta.bootstrap_resamples = run.ensemble.bootstrap_resamples;
        meta.censor_policy = run.ensemble.censor_policy;
        meta.cubic_coupling = cubic_coupling(run.system);
        double censored = 0.0;
        for (const auto& row : sweep.rows) censored = std::max(censored, row.censored_fraction);
        auto entry = run_entry(run, meta, censored, wall, path.filename().string());
        entry["grid"] = grid;
        entries.push_back(std::move(entry));
    }
    write_manifest(out_dir, "sweep", request.scenario, std::move(entries), summary);
    return summary;
}

RunSummary run_oracle_scenario(const RunRequest& request, const std::filesystem::path& out_dir,
                               OutputFormat format) {
    const auto runs = resolve_runs(request);
    std::filesystem::create_directories(out_dir);

    RunSummary summary;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& run : runs) {
        const auto table = oracle_table(run, run.ensemble.output_times);
        const auto path = out_dir / fmt::format("oracle_{}.{}", file_stem(run), extension(format));
        write_text_file(path, format == OutputFormat::Csv ? oracle_csv(table) : oracle_json(table));
        summary.files.push_back(path);
        nlohmann::json r;
        r["regime"] = std::string(to_string(run.regime));
        r["model"] = table.model;
        r["status"] = table.status;
        r["file"] = path.filename().string();
        r["config"] = effective_json(run.effective);
        entries.push_back(std::move(r));
    }
    write_manifest(out_dir, "oracle", request.scenario, std::move(entries), summary);
    return summary;
}

}  // namespace cnl
