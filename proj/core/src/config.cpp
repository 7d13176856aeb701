#include "cnl/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "cnl/units.hpp"

namespace cnl {

namespace {

const std::vector<KeySpec> kKeys = {
    {"regime", "symmetric", "symmetric | mass-tuned | freq-tuned | custom | all"},
    {"quantum", "0", "1 selects quantum state preparation and switches bath noise off"},

    {"particle1.mass", "8e-17", "kg"},
    {"particle1.omega", "50000", "trap angular frequency, rad/s"},
    {"particle1.charge", "0", "C"},
    {"particle1.gamma", "0.0001", "damping rate, 1/s"},
    {"particle1.bath_temperature", "300", "K"},
    {"particle2.mass", "8e-17", "kg"},
    {"particle2.omega", "50000", "trap angular frequency, rad/s"},
    {"particle2.charge", "0", "C"},
    {"particle2.gamma", "0.0001", "damping rate, 1/s"},
    {"particle2.bath_temperature", "300", "K"},

    {"coupling.kappa", "2.3e-24", "N m^2"},
    {"coupling.kappa_from_charges", "0", "1 derives kappa from the particle charges"},
    {"coupling.d", "3e-06", "equilibrium separation, m"},
    {"coupling.mode", "cubic", "full-coulomb | harmonic | cubic"},
    {"coupling.residual", "0", "uncompensated fraction of the linear interaction force"},
    {"coupling.min_separation", "0.01", "full-Coulomb validity limit as a fraction of d"},

    {"state1.kind", "thermal-squeezed", "thermal | thermal-squeezed | ground | squeezed | gaussian"},
    {"state1.temperature", "300", "preparation temperature, K"},
    {"state1.sigma_z", "3e-08", "target position spread, m"},
    {"state1.sigma_p", "0", "momentum spread for kind=gaussian, kg m/s"},
    {"state1.xi", "0", "explicit squeeze factor for kind=squeezed (0: reach sigma_z)"},
    {"state1.freefall_sigma_z", "0", "widen by freefall up to this spread, m (0: none)"},
    {"state1.mean_z", "0", "m"},
    {"state1.mean_p", "0", "kg m/s"},
    {"state2.kind", "thermal", "thermal | thermal-squeezed | ground | squeezed | gaussian"},
    {"state2.temperature", "0.01", "preparation temperature, K"},
    {"state2.sigma_z", "0", "target position spread, m"},
    {"state2.sigma_p", "0", "momentum spread for kind=gaussian, kg m/s"},
    {"state2.xi", "0", "explicit squeeze factor for kind=squeezed"},
    {"state2.freefall_sigma_z", "0", "widen by freefall up to this spread, m (0: none)"},
    {"state2.mean_z", "0", "m"},
    {"state2.mean_p", "0", "kg m/s"},

    {"integrator.dt", "0", "time step, s (0: min(1/w1,1/w2)/200)"},
    {"integrator.z_cutoff", "0.5", "censoring threshold on |z_i| as a fraction of d"},
    {"integrator.scheme", "split", "split | heun"},
    {"integrator.thermal_noise", "1", "bath noise on (1) or off (0)"},

    {"ensemble.n_trajectories", "10000", "trajectories per run"},
    {"ensemble.seed", "1", "master seed"},
    {"ensemble.t_end", "2e-05", "horizon, s"},
    {"ensemble.n_outputs", "100", "output intervals between 0 and t_end"},
    {"ensemble.censor_policy", "exclude-after-censor", "exclude-after-censor | drop-censored"},
    {"ensemble.bootstrap", "1000", "bootstrap resamples (0: std/sqrt(n) errors)"},
    {"ensemble.workers", "0", "worker threads (0: CNL_WORKERS or hardware concurrency)"},

    {"sweep.parameter", "state1.sigma_z", "numeric key varied by sweep"},
    {"sweep.min", "1e-08", "first grid value"},
    {"sweep.max", "2e-07", "last grid value"},
    {"sweep.points", "16", "grid size"},
    {"sweep.spacing", "log", "log | linear"},
    {"sweep.values", "", "explicit comma separated grid (overrides min/max/points)"},
    {"sweep.target", "0.7071067811865476", "target SNR of p2"},
    {"sweep.tol", "0.01", "relative tolerance on the target"},
};

std::string valid_key_list() {
    std::string out;
    for (const auto& k : kKeys) {
        if (!out.empty()) out += ", ";
        out += k.key;
    }
    return out;
}

void flatten(const nlohmann::json& node, const std::string& prefix, ParameterSet& out) {
    if (node.is_object()) {
        for (const auto& [name, child] : node.items()) flatten(child, prefix.empty() ? name : prefix + "." + name, out);
        return;
    }
    if (prefix.empty()) throw ConfigError("config document must be a JSON object");
    if (node.is_string()) {
        out.set(prefix, node.get<std::string>());
    } else if (node.is_boolean()) {
        out.set(prefix, node.get<bool>() ? "1" : "0");
    } else if (node.is_number_integer() || node.is_number_unsigned()) {
        out.set(prefix, node.dump());
    } else if (node.is_number()) {
        out.set(prefix, format_number(node.get<double>()));
    } else if (node.is_array()) {
        std::string joined;
        for (const auto& item : node) {
            if (!item.is_number()) throw ConfigError(fmt::format("array for '{}' must hold numbers", prefix));
            if (!joined.empty()) joined += ",";
            joined += format_number(item.get<double>());
        }
        out.set(prefix, joined);
    } else {
        throw ConfigError(fmt::format("unsupported value for '{}'", prefix));
    }
}

}  // namespace

const std::vector<KeySpec>& known_keys() { return kKeys; }

bool is_known_key(std::string_view key) {
    return std::any_of(kKeys.begin(), kKeys.end(), [&](const KeySpec& k) { return k.key == key; });
}

void ParameterSet::set(std::string_view key, std::string value) {
    if (!is_known_key(key))
        throw ConfigError(fmt::format("unknown configuration key '{}'; valid keys: {}", key, valid_key_list()));
    values_[std::string(key)] = std::move(value);
}

std::optional<std::string> ParameterSet::get(std::string_view key) const {
    const auto it = values_.find(std::string(key));
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string ParameterSet::text(std::string_view key) const {
    auto v = get(key);
    if (!v) throw ConfigError(fmt::format("missing configuration key '{}'", key));
    return *v;
}

double ParameterSet::number(std::string_view key) const {
    const auto raw = text(key);
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(raw.c_str(), &end);
    if (raw.empty() || end != raw.c_str() + raw.size() || errno == ERANGE || !std::isfinite(value))
        throw ConfigError(fmt::format("key '{}' expects a finite number, got '{}'", key, raw));
    return value;
}

std::uint64_t ParameterSet::integer(std::string_view key) const {
    const auto raw = text(key);
    errno = 0;
    char* end = nullptr;
    const unsigned long long value = std::strtoull(raw.c_str(), &end, 10);
    if (raw.empty() || raw.front() == '-' || end != raw.c_str() + raw.size() || errno == ERANGE)
        throw ConfigError(fmt::format("key '{}' expects a non-negative integer, got '{}'", key, raw));
    return value;
}

bool ParameterSet::flag(std::string_view key) const {
    const auto raw = text(key);
    if (raw == "1" || raw == "true") return true;
    if (raw == "0" || raw == "false") return false;
    throw ConfigError(fmt::format("key '{}' expects 0/1/true/false, got '{}'", key, raw));
}

void ParameterSet::merge(const ParameterSet& over) {
    for (const auto& [k, v] : over.values_) values_[k] = v;
}

ParameterSet default_parameters() {
    ParameterSet out;
    for (const auto& k : kKeys) out.set(k.key, std::string(k.default_value));
    return out;
}

ParameterSet parse_overrides(const std::vector<std::string>& assignments) {
    ParameterSet out;
    for (const auto& a : assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError(fmt::format("override '{}' is not of the form key=value", a));
        out.set(a.substr(0, eq), a.substr(eq + 1));
    }
    return out;
}

ParameterSet parse_config_text(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
    }
    ParameterSet out;
    flatten(doc, "", out);
    return out;
}

ParameterSet load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string format_number(double value) { return fmt::format("{}", value); }

}  // namespace cnl
