#include "uwsim/report_io.hpp"

#include <cmath>

#include "uwsim/scenario_io.hpp"

namespace uwsim {

namespace {

nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> optional_from(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

std::string optional_text(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

nlohmann::json report_to_json(const MetricsReport& r) {
    nlohmann::json energy = nlohmann::json::object();
    for (const auto& [id, joules] : r.per_node_energy_j) energy[std::to_string(id)] = joules;
    nlohmann::json j;
    j["pdr_percent"] = r.pdr_percent;
    j["altn_s"] = r.altn_s;
    j["first_death_s"] = optional_json(r.first_death_s);
    j["median_death_s"] = optional_json(r.median_death_s);
    j["mean_e2e_delay_s"] = optional_json(r.mean_e2e_delay_s);
    j["delay_jitter_s"] = optional_json(r.delay_jitter_s);
    j["convergence_time_s"] = optional_json(r.convergence_time_s);
    j["alive_node_count"] = r.alive_node_count;
    j["per_node_energy_j"] = std::move(energy);
    j["control_overhead_packets"] = r.control_overhead_packets;
    j["data_generated"] = r.data_generated;
    j["data_delivered"] = r.data_delivered;
    return j;
}

MetricsReport report_from_json(const nlohmann::json& j) {
    MetricsReport r;
    r.pdr_percent = j.at("pdr_percent").get<double>();
    r.altn_s = j.at("altn_s").get<double>();
    r.first_death_s = optional_from(j, "first_death_s");
    r.median_death_s = optional_from(j, "median_death_s");
    r.mean_e2e_delay_s = optional_from(j, "mean_e2e_delay_s");
    r.delay_jitter_s = optional_from(j, "delay_jitter_s");
    r.convergence_time_s = optional_from(j, "convergence_time_s");
    r.alive_node_count = j.at("alive_node_count").get<int>();
    for (const auto& [id, joules] : j.at("per_node_energy_j").items())
        r.per_node_energy_j[static_cast<std::uint32_t>(std::stoul(id))] = joules.get<double>();
    r.control_overhead_packets = j.at("control_overhead_packets").get<std::uint64_t>();
    r.data_generated = j.value("data_generated", std::uint64_t{0});
    r.data_delivered = j.value("data_delivered", std::uint64_t{0});
    return r;
}

const std::vector<std::string>& report_csv_columns() {
    static const std::vector<std::string> columns{
        "pdr_percent",      "altn_s",           "first_death_s",
        "median_death_s",   "mean_e2e_delay_s", "delay_jitter_s",
        "convergence_time_s", "alive_node_count", "control_overhead_packets",
        "data_generated",   "data_delivered",
    };
    return columns;
}

std::vector<std::optional<double>> report_metric_values(const MetricsReport& r) {
    return {r.pdr_percent,
            r.altn_s,
            r.first_death_s,
            r.median_death_s,
            r.mean_e2e_delay_s,
            r.delay_jitter_s,
            r.convergence_time_s,
            static_cast<double>(r.alive_node_count),
            static_cast<double>(r.control_overhead_packets),
            static_cast<double>(r.data_generated),
            static_cast<double>(r.data_delivered)};
}

std::vector<std::string> report_csv_values(const MetricsReport& r) {
    std::vector<std::string> out;
    for (const auto& v : report_metric_values(r)) out.push_back(optional_text(v));
    return out;
}

MeanStd mean_std(const std::vector<double>& values) {
    MeanStd m;
    m.count = values.size();
    if (values.empty()) return m;
    CompensatedSum sum;
    for (double v : values) sum.add(v);
    m.mean = sum.value() / static_cast<double>(values.size());
    if (values.size() > 1) {
        CompensatedSum sq;
        for (double v : values) sq.add((v - m.mean) * (v - m.mean));
        m.stddev = std::sqrt(sq.value() / static_cast<double>(values.size() - 1));
    }
    return m;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_line(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(fields[i]);
    }
    out += '\n';
    return out;
}

}  // namespace uwsim
