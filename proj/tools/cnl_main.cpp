// cnl: ensemble simulator for two trapped charges with a cubic Coulomb coupling.
//
//   cnl run    --scenario fig1b-classical --out results/
//   cnl sweep  --scenario fig3-classical-sweep --n-traj 2000 --out sweep/
//   cnl oracle --scenario fig1b-classical --set regime=mass-tuned --out oracle/
//   cnl validate
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error,
// 3 every trajectory of some run was censored, 4 validation failed.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cnl/config.hpp"
#include "cnl/ensemble.hpp"
#include "cnl/oracle.hpp"
#include "cnl/scenario.hpp"

namespace {

struct CommonOptions {
    std::string scenario = "custom";
    std::string config_file;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> n_traj;
    std::string out = "cnl-out";
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--scenario", o.scenario, "fig1b-classical | fig1b-quantum | fig2-trajectories | "
                                              "fig3-classical-sweep | fig3-quantum-sweep | custom");
    cmd->add_option("--config", o.config_file, "JSON config file (dotted or nested keys)")->check(CLI::ExistingFile);
    cmd->add_option("--set", o.overrides, "key=value override, repeatable")->take_all();
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--n-traj", o.n_traj, "trajectories per run");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
}

cnl::RunRequest make_request(const CommonOptions& o) {
    cnl::RunRequest req;
    req.scenario = o.scenario;
    cnl::scenario_preset(req.scenario);  // rejects unknown names early
    if (!o.config_file.empty()) req.file_layer = cnl::load_config_file(o.config_file);
    req.cli_layer = cnl::parse_overrides(o.overrides);
    if (o.seed) req.cli_layer.set("ensemble.seed", std::to_string(*o.seed));
    if (o.n_traj) req.cli_layer.set("ensemble.n_trajectories", std::to_string(*o.n_traj));
    return req;
}

cnl::OutputFormat output_format(const CommonOptions& o) {
    return o.format == "json" ? cnl::OutputFormat::Json : cnl::OutputFormat::Csv;
}

int report(const cnl::RunSummary& summary) {
    for (const auto& f : summary.files) fmt::print("wrote {}\n", f.string());
    if (summary.all_censored) {
        fmt::print(stderr, "error: every trajectory of at least one run was censored\n");
        return 3;
    }
    return 0;
}

int validate(std::size_t n_traj, std::uint64_t seed) {
    bool ok = true;
    for (const auto& check : cnl::oracle::identity_suite()) {
        const bool pass = check.residual <= 1e-12;
        ok = ok && pass;
        fmt::print("{} identity: {} (residual {:.3e})\n", pass ? "PASS" : "FAIL", check.name, check.residual);
    }

    // Without coupling nothing can push particle 2 on average. Censoring by the
    // position cutoff still happens and does not bias <p2>.
    cnl::RunRequest req;
    req.cli_layer = cnl::parse_overrides({"coupling.kappa=0", "ensemble.t_end=2e-05", "ensemble.n_outputs=20",
                                          "ensemble.bootstrap=200"});
    req.cli_layer.set("ensemble.n_trajectories", std::to_string(n_traj));
    req.cli_layer.set("ensemble.seed", std::to_string(seed));
    const auto run = cnl::resolve_runs(req).front();
    const auto series = cnl::run_ensemble(run.system, run.states, run.ensemble);
    double worst = 0.0;
    for (const auto& row : series.rows) {
        const auto& p2 = row.stats[cnl::kP2];
        if (p2.se > 0.0) worst = std::max(worst, std::abs(p2.mean) / p2.se);
    }
    const bool null_ok = worst < 4.0;
    ok = ok && null_ok;
    fmt::print("{} null test: kappa = 0, n = {}, max |<p2>|/se = {:.2f}, censored = {}\n", null_ok ? "PASS" : "FAIL",
               n_traj, worst, series.n_censored);
    return ok ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ensemble simulator for two trapped charges coupled by the cubic Coulomb term"};
    app.require_subcommand(1);
    app.set_version_flag("--version", CNL_TOOL_VERSION);

    CommonOptions run_opts, sweep_opts, oracle_opts;
    bool dump_raw = false;
    auto* run = app.add_subcommand("run", "simulate the ensemble and write moment series");
    add_common(run, run_opts);
    run->add_flag("--dump-raw", dump_raw, "also write every trajectory sample");

    auto* sweep = app.add_subcommand("sweep", "target-SNR crossing over a parameter grid");
    add_common(sweep, sweep_opts);

    auto* oracle = app.add_subcommand("oracle", "closed-form short-transient predictions");
    add_common(oracle, oracle_opts);

    std::size_t validate_n = 2000;
    std::uint64_t validate_seed = 7;
    auto* check = app.add_subcommand("validate", "fast self-check: oracle identities and a kappa = 0 null run");
    check->add_option("--n-traj", validate_n, "trajectories for the null run")->check(CLI::Range(2, 1000000));
    check->add_option("--seed", validate_seed, "seed for the null run");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return report(cnl::run_scenario(make_request(run_opts), run_opts.out, output_format(run_opts), dump_raw));
        if (*sweep)
            return report(cnl::run_sweep_scenario(make_request(sweep_opts), sweep_opts.out, output_format(sweep_opts)));
        if (*oracle)
            return report(
                cnl::run_oracle_scenario(make_request(oracle_opts), oracle_opts.out, output_format(oracle_opts)));
        if (*check) return validate(validate_n, validate_seed);
    } catch (const cnl::ConfigError& e) {
        fmt::print(stderr, "configuration error: {}\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}
