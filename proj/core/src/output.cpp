#include "cnl/output.hpp"

#include <cmath>
#include <fstream>
#include <optional>

#include <fmt/format.h>
#include <json.hpp>

namespace cnl {

namespace {

std::string field(std::optional<double> v) {
    if (!v || !std::isfinite(*v)) return {};
    return format_value(*v);
}

std::optional<double> normalised(double x, double scale) {
    if (!(scale > 0.0)) return std::nullopt;
    return x / scale;
}

nlohmann::json json_value(std::optional<double> v) {
    if (!v || !std::isfinite(*v)) return nullptr;
    return *v;
}

}  // namespace

std::string format_value(double value) {
    if (!std::isfinite(value)) return {};
    return fmt::format("{:.12e}", value);
}

std::string moments_csv(const MomentSeries& series) {
    std::string out = "t,n_alive";
    for (auto name : kVariableNames) out += fmt::format(",mean_{0},std_{0},se_{0}", name);
    out += ",snr_p2,snr_p2_lo,snr_p2_hi,se_snr_p2,snr_defined";
    for (auto name : kVariableNames) out += fmt::format(",mean_{0}_norm,std_{0}_norm", name);
    out += '\n';
    for (const auto& row : series.rows) {
        out += format_value(row.t);
        out += fmt::format(",{}", row.n_alive);
        for (const auto& st : row.stats)
            out += fmt::format(",{},{},{}", format_value(st.mean), format_value(st.std), format_value(st.se));
        out += fmt::format(",{},{},{},{},{}", field(row.snr), field(row.snr_low), field(row.snr_high),
                           field(row.snr_se), row.snr ? 1 : 0);
        for (std::size_t v = 0; v < 4; ++v) {
            const double scale = series.initial_std[v];
            out += fmt::format(",{},{}", field(normalised(row.stats[v].mean, scale)),
                               field(normalised(row.stats[v].std, scale)));
        }
        out += '\n';
    }
    return out;
}

std::string moments_json(const MomentSeries& series) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : series.rows) {
        nlohmann::json r;
        r["t"] = row.t;
        r["n_alive"] = row.n_alive;
        for (std::size_t v = 0; v < 4; ++v) {
            const std::string name(kVariableNames[v]);
            r["mean_" + name] = row.stats[v].mean;
            r["std_" + name] = row.stats[v].std;
            r["se_" + name] = row.stats[v].se;
            r["mean_" + name + "_norm"] = json_value(normalised(row.stats[v].mean, series.initial_std[v]));
            r["std_" + name + "_norm"] = json_value(normalised(row.stats[v].std, series.initial_std[v]));
        }
        r["snr_p2"] = json_value(row.snr);
        r["snr_p2_lo"] = json_value(row.snr_low);
        r["snr_p2_hi"] = json_value(row.snr_high);
        r["se_snr_p2"] = json_value(row.snr_se);
        r["snr_defined"] = row.snr.has_value();
        rows.push_back(std::move(r));
    }
    nlohmann::json doc;
    doc["status"] = series.status == SeriesStatus::Complete ? "complete" : "truncated-all-censored";
    doc["n_trajectories"] = series.n_trajectories;
    doc["n_censored"] = series.n_censored;
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

std::string sweep_csv(const SweepResult& sweep) {
    std::string out = "value,crossed,t_star,p_at,sigma_at,snr_at,censored_fraction,status\n";
    for (const auto& row : sweep.rows) {
        const bool have = row.ok && row.crossing.defined;
        out += fmt::format("{},{},{},{},{},{},{},{}\n", format_value(row.value), row.crossing.crossed ? 1 : 0,
                           have ? format_value(row.crossing.t_star) : "", have ? format_value(row.crossing.p_at) : "",
                           have ? format_value(row.crossing.sigma_at) : "",
                           have ? format_value(row.crossing.snr_at) : "", format_value(row.censored_fraction),
                           row.status);
    }
    return out;
}

std::string sweep_json(const SweepResult& sweep) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : sweep.rows) {
        const bool have = row.ok && row.crossing.defined;
        nlohmann::json r;
        r["value"] = row.value;
        r["crossed"] = row.crossing.crossed;
        r["t_star"] = have ? nlohmann::json(row.crossing.t_star) : nlohmann::json(nullptr);
        r["p_at"] = have ? nlohmann::json(row.crossing.p_at) : nlohmann::json(nullptr);
        r["sigma_at"] = have ? nlohmann::json(row.crossing.sigma_at) : nlohmann::json(nullptr);
        r["snr_at"] = have ? nlohmann::json(row.crossing.snr_at) : nlohmann::json(nullptr);
        r["censored_fraction"] = row.censored_fraction;
        r["status"] = row.status;
        rows.push_back(std::move(r));
    }
    nlohmann::json doc;
    doc["parameter"] = sweep.parameter;
    doc["regime"] = std::string(to_string(sweep.regime));
    doc["target"] = sweep.target;
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

std::string oracle_csv(const OracleTable& table) {
    std::string out = "t,mean_p2,snr,status\n";
    if (!table.available) {
        out += fmt::format(",,,{}\n", table.status);
        return out;
    }
    for (const auto& row : table.rows)
        out += fmt::format("{},{},{},ok\n", format_value(row.t), format_value(row.mean_p2), format_value(row.snr));
    return out;
}

std::string oracle_json(const OracleTable& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) rows.push_back({{"t", row.t}, {"mean_p2", row.mean_p2}, {"snr", row.snr}});
    nlohmann::json doc;
    doc["available"] = table.available;
    doc["model"] = table.model;
    doc["status"] = table.status;
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

std::string raw_samples_csv(const SampleMatrix& samples) {
    std::string out = "trajectory,t,z1,p1,z2,p2\n";
    for (std::size_t j = 0; j < samples.n_trajectories(); ++j) {
        for (std::size_t k = 0; k < samples.alive_length(j); ++k) {
            out += fmt::format("{},{},{},{},{},{}\n", j, format_value(samples.times()[k]),
                               format_value(samples.at(k, kZ1, j)), format_value(samples.at(k, kP1, j)),
                               format_value(samples.at(k, kZ2, j)), format_value(samples.at(k, kP2, j)));
        }
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace cnl
