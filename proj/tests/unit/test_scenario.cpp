#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cnl/config.hpp"
#include "cnl/output.hpp"
#include "cnl/scenario.hpp"

using namespace cnl;
namespace fs = std::filesystem;

namespace {

RunRequest request(const std::string& scenario, const std::vector<std::string>& sets) {
    RunRequest r;
    r.scenario = scenario;
    r.cli_layer = parse_overrides(sets);
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("cnl-test-" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("unknown keys are rejected with the list of valid keys") {
    try {
        parse_overrides({"particle1.massx=1"});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("particle1.massx") != std::string::npos);
        CHECK(msg.find("coupling.kappa") != std::string::npos);
        CHECK(msg.find("ensemble.seed") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_overrides({"novalue"}), ConfigError);
}

TEST_CASE("typed accessors") {
    auto p = default_parameters();
    CHECK(p.number("coupling.kappa") == 2.3e-24);
    CHECK(p.integer("ensemble.n_trajectories") == 10000);
    CHECK(p.flag("integrator.thermal_noise"));
    p.set("coupling.d", "3um");
    CHECK_THROWS_AS(p.number("coupling.d"), ConfigError);
    p.set("ensemble.seed", "-1");
    CHECK_THROWS_AS(p.integer("ensemble.seed"), ConfigError);
    p.set("quantum", "yes");
    CHECK_THROWS_AS(p.flag("quantum"), ConfigError);
}

TEST_CASE("presets carry the reference parameters") {
    const auto runs = resolve_runs(request("fig1b-classical", {}));
    REQUIRE(runs.size() == 3);
    const auto& sym = runs[0];
    CHECK(sym.regime == Regime::Symmetric);
    CHECK(sym.system.particles[0].mass == 8e-17);
    CHECK(sym.system.particles[0].trap_omega == 5e4);
    CHECK(sym.system.particles[1].damping_rate == 1e-4);
    CHECK(sym.system.particles[0].bath_temperature == 300.0);
    CHECK(sym.system.coupling.kappa == 2.3e-24);
    CHECK(sym.system.coupling.separation == 3e-6);
    CHECK(sym.states[0].sigma_z == 30e-9);
    CHECK(sym.states[1].sigma_z == doctest::Approx(8.3085768938e-10).epsilon(1e-9));
    CHECK(runs[1].regime == Regime::MassTuned);
    CHECK(runs[1].system.particles[0].mass == 8e-16);
    CHECK(runs[1].system.particles[0].trap_omega == 5e4);
    CHECK(runs[2].regime == Regime::FrequencyTuned);
    CHECK(runs[2].system.particles[0].trap_omega == 2.5e6);
    CHECK(runs[2].system.particles[0].mass == 8e-17);
    CHECK(sym.ensemble.output_times.back() == 2e-5);
}

TEST_CASE("quantum preset") {
    const auto runs = resolve_runs(request("fig1b-quantum", {"regime=mass-tuned"}));
    REQUIRE(runs.size() == 1);
    const auto& r = runs[0];
    CHECK(r.quantum);
    CHECK_FALSE(r.system.integration.thermal_noise);
    CHECK(r.system.particles[0].damping_rate == 0.0);
    CHECK(r.system.particles[1].damping_rate == 1e-4);
    CHECK(r.states[0].sigma_z == doctest::Approx(1e-11));
    CHECK(r.states[0].label == StateLabel::QuantumSqueezed);
    CHECK(r.states[1].label == StateLabel::QuantumGround);
}

TEST_CASE("resolution precedence: defaults < preset < regime < file < command line") {
    RunRequest r = request("fig2-trajectories", {"ensemble.n_outputs=7"});
    r.file_layer = parse_config_text(R"({"regime": "mass-tuned", "ensemble": {"n_outputs": 9, "seed": 4},
                                        "particle1": {"mass": 1e-15}})");
    const auto runs = resolve_runs(r);
    REQUIRE(runs.size() == 1);
    CHECK(runs[0].regime == Regime::MassTuned);
    CHECK(runs[0].system.particles[0].mass == 1e-15);        // file beats regime preset
    CHECK(runs[0].ensemble.output_times.size() == 8);        // command line beats file
    CHECK(runs[0].ensemble.master_seed == 4);                // file beats default
    CHECK(runs[0].effective.text("ensemble.n_outputs") == "7");
}

TEST_CASE("config file errors") {
    CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"coupling": {"kapa": 1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[1, 2]"), ConfigError);
    const auto p = parse_config_text(R"({"sweep": {"values": [1e-8, 2e-8]}, "quantum": true})");
    CHECK(p.text("sweep.values") == "1e-08,2e-08");
    CHECK(p.text("quantum") == "1");
}

TEST_CASE("invalid physical values surface as config errors") {
    CHECK_THROWS_AS(resolve_runs(request("custom", {"particle1.mass=-1"})), ConfigError);
    CHECK_THROWS_AS(resolve_runs(request("custom", {"state1.kind=coherent"})), ConfigError);
    CHECK_THROWS_AS(resolve_runs(request("custom", {"state2.temperature=0"})), ConfigError);
    CHECK_THROWS_AS(resolve_runs(request("custom", {"regime=tuned"})), ConfigError);
    CHECK_THROWS_AS(resolve_runs(request("custom", {"ensemble.n_outputs=0"})), ConfigError);
    CHECK_THROWS_AS(resolve_runs(request("fig9", {})), ConfigError);
}

TEST_CASE("charges can set the coupling") {
    const auto runs = resolve_runs(request(
        "custom", {"coupling.kappa_from_charges=1", "particle1.charge=1.602176634e-17", "particle2.charge=1.602176634e-17"}));
    CHECK(runs[0].system.coupling.kappa == doctest::Approx(2.3070775523e-24).epsilon(1e-9));
}

TEST_CASE("uniform schedule") {
    const auto s = uniform_schedule(2e-6, 4);
    REQUIRE(s.size() == 5);
    CHECK(s.front() == 0.0);
    CHECK(s.back() == 2e-6);
    CHECK(s[1] == doctest::Approx(5e-7));
    CHECK_THROWS_AS(uniform_schedule(0.0, 4), ConfigError);
}

TEST_CASE("sweep grids") {
    auto p = default_parameters();
    auto g = sweep_grid(p);
    REQUIRE(g.size() == 16);
    CHECK(g.front() == 1e-8);
    CHECK(g.back() == 2e-7);
    CHECK(g[1] / g[0] == doctest::Approx(g[15] / g[14]));
    p.set("sweep.values", "1e-8,5e-8");
    g = sweep_grid(p);
    CHECK(g == std::vector<double>{1e-8, 5e-8});
    p.set("sweep.values", "5e-8,1e-8");
    CHECK_THROWS_AS(sweep_grid(p), ConfigError);
    p.set("sweep.values", "");
    p.set("sweep.spacing", "linear");
    p.set("sweep.points", "3");
    CHECK(sweep_grid(p)[1] == doctest::Approx(1.05e-7));
}

TEST_CASE("sweep records failing points and continues") {
    const auto base = resolve_runs(request("custom", {"ensemble.n_trajectories=200", "ensemble.bootstrap=0",
                                                      "ensemble.n_outputs=10"}))[0];
    const std::vector<double> grid{-1.0, 1e-8, 3e-8};
    const auto res = run_sweep(base, "state1.sigma_z", grid, 0.7071, 0.01);
    REQUIRE(res.rows.size() == 3);
    CHECK_FALSE(res.rows[0].ok);
    CHECK(res.rows[0].status.find("sigma_z") != std::string::npos);
    CHECK(res.rows[1].ok);
    CHECK(res.rows[2].ok);
    CHECK_THROWS_AS(run_sweep(base, "sweep.min", grid, 0.7, 0.01), ConfigError);
    const std::vector<double> bad{2.0, 1.0};
    CHECK_THROWS_AS(run_sweep(base, "state1.sigma_z", bad, 0.7, 0.01), ConfigError);
}

TEST_CASE("single-point sweep matches a plain run") {
    const auto base = resolve_runs(request("custom", {"ensemble.n_trajectories=300", "ensemble.bootstrap=0",
                                                      "ensemble.n_outputs=20", "state1.sigma_z=5e-08"}))[0];
    const std::vector<double> grid{5e-8};
    const auto res = run_sweep(base, "state1.sigma_z", grid, 0.7071067811865476, 0.01);
    const auto series = run_ensemble(base.system, base.states, base.ensemble);
    const auto c = target_crossing(series, 0.7071067811865476, 0.01);
    CHECK(res.rows[0].crossing.t_star == c.t_star);
    CHECK(res.rows[0].crossing.p_at == c.p_at);
}

TEST_CASE("oracle table") {
    auto runs = resolve_runs(request("custom", {"regime=mass-tuned", "state1.sigma_z=3e-08"}));
    const std::vector<double> times{0.0, 1e-6, 2e-6};
    auto t = oracle_table(runs[0], times);
    REQUIRE(t.available);
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[0].mean_p2 == 0.0);
    CHECK(t.rows[1].mean_p2 == doctest::Approx(7.6666666667e-23).epsilon(1e-9));
    CHECK(t.rows[2].mean_p2 == doctest::Approx(1.5333333333e-22).epsilon(1e-9));

    runs = resolve_runs(request("custom", {"regime=symmetric"}));
    t = oracle_table(runs[0], times);
    CHECK_FALSE(t.available);
    CHECK(t.status.find("no oracle") != std::string::npos);
    CHECK(oracle_csv(t).find("no oracle") != std::string::npos);

    runs = resolve_runs(request("custom", {"regime=freq-tuned"}));
    const auto ts = uniform_schedule(2e-6, 200);
    t = oracle_table(runs[0], ts);
    // Increments alternate between fast and slow as cos^2(w1 t) modulates the rate.
    double min_inc = INFINITY, max_inc = 0.0;
    for (std::size_t k = 1; k < t.rows.size(); ++k) {
        const double inc = t.rows[k].mean_p2 - t.rows[k - 1].mean_p2;
        min_inc = std::min(min_inc, inc);
        max_inc = std::max(max_inc, inc);
    }
    CHECK(min_inc < 0.05 * max_inc);
}

TEST_CASE("moments CSV schema and finiteness") {
    const auto run = resolve_runs(request("custom", {"ensemble.n_trajectories=300", "ensemble.bootstrap=50",
                                                     "ensemble.n_outputs=10"}))[0];
    const auto csv = moments_csv(run_ensemble(run.system, run.states, run.ensemble));
    const auto header = csv.substr(0, csv.find('\n'));
    for (const char* col : {"t", "n_alive", "mean_z1", "std_z1", "mean_p2", "std_p2", "snr_p2", "se_p2", "se_snr_p2",
                            "snr_p2_lo", "snr_p2_hi", "mean_p2_norm", "std_z1_norm"})
        CHECK(("," + header + ",").find("," + std::string(col) + ",") != std::string::npos);
    CHECK(csv.find("nan") == std::string::npos);
    CHECK(csv.find("inf") == std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);

    // Time column is strictly increasing.
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    double prev = -1.0;
    while (std::getline(in, line)) {
        const double t = std::stod(line.substr(0, line.find(',')));
        CHECK(t > prev);
        prev = t;
    }
}

TEST_CASE("undefined values are empty fields") {
    MomentSeries s;
    MomentRow r;
    r.t = 0.0;
    r.n_alive = 1;
    s.rows.push_back(r);
    const auto csv = moments_csv(s);
    CHECK(csv.find("nan") == std::string::npos);
    CHECK(csv.find(",,,,0,") != std::string::npos);  // snr, band, se empty, snr_defined = 0
    const auto js = nlohmann::json::parse(moments_json(s));
    CHECK(js["rows"][0]["snr_p2"].is_null());
    CHECK(format_value(NAN).empty());
}

TEST_CASE("run_scenario writes files, a manifest and identical bytes for the same seed") {
    const auto dir_a = scratch("a");
    const auto dir_b = scratch("b");
    const auto req = request("fig1b-classical", {"regime=symmetric", "ensemble.n_trajectories=200",
                                                 "ensemble.bootstrap=20", "ensemble.n_outputs=5"});
    const auto a = run_scenario(req, dir_a, OutputFormat::Csv);
    const auto b = run_scenario(req, dir_b, OutputFormat::Csv);
    REQUIRE(a.files.size() == 1);
    CHECK_FALSE(a.all_censored);
    CHECK(slurp(a.files[0]) == slurp(b.files[0]));
    const auto manifest = nlohmann::json::parse(slurp(dir_a / "manifest.json"));
    CHECK(manifest["scenario"] == "fig1b-classical");
    CHECK(manifest["files"][0] == "moments_symmetric.csv");
    const auto& run = manifest["runs"][0];
    CHECK(run["seed"] == 1);
    CHECK(run["scheme"] == "split-exact-harmonic");
    CHECK(run["dt_s"].get<double>() == doctest::Approx(1e-7));
    CHECK(run["config"]["coupling.kappa"] == "2.3e-24");
    CHECK(run.contains("wall_clock_s"));
    CHECK(run.contains("censored_fraction"));
    CHECK(manifest.contains("version"));
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("all-censored runs are reported") {
    const auto dir = scratch("censored");
    const auto req = request("custom", {"state2.mean_z=2e-06", "ensemble.n_trajectories=20", "ensemble.bootstrap=0",
                                        "ensemble.n_outputs=5"});
    const auto s = run_scenario(req, dir, OutputFormat::Json);
    CHECK(s.all_censored);
    const auto js = nlohmann::json::parse(slurp(s.files[0]));
    CHECK(js["status"] == "truncated-all-censored");
    fs::remove_all(dir);
}

TEST_CASE("sweep and oracle drivers") {
    const auto dir = scratch("sweep");
    auto req = request("fig3-classical-sweep", {"regime=mass-tuned", "ensemble.n_trajectories=100",
                                                "sweep.values=3e-8,1e-7", "ensemble.n_outputs=20"});
    auto s = run_sweep_scenario(req, dir, OutputFormat::Csv);
    REQUIRE(s.files.size() == 1);
    const auto csv = slurp(s.files[0]);
    CHECK(csv.rfind("value,crossed,t_star,p_at,sigma_at,snr_at,censored_fraction,status\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

    s = run_oracle_scenario(request("fig1b-classical", {}), dir, OutputFormat::Csv);
    CHECK(s.files.size() == 3);
    CHECK(slurp(dir / "oracle_symmetric.csv").find("no oracle") != std::string::npos);
    fs::remove_all(dir);
}
