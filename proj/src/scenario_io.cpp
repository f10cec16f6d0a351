#include "uwsim/scenario_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace uwsim {

std::string format_double(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (std::isnan(value)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad(std::string_view key, const std::string& message, int line) {
    throw ConfigError(std::string(key), std::string(key) + ": " + message, line);
}

double to_double(std::string_view key, std::string_view text, int line) {
    text = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty())
        bad(key, "expected a number, got '" + std::string(text) + "'", line);
    return v;
}

template <class T>
T to_integer(std::string_view key, std::string_view text, int line) {
    text = trim(text);
    if constexpr (std::is_unsigned_v<T>) {
        if (!text.empty() && text.front() == '-') bad(key, "must be >= 0", line);
    }
    T v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec == std::errc::result_out_of_range) bad(key, "'" + std::string(text) + "' is out of range", line);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty())
        bad(key, "expected an integer, got '" + std::string(text) + "'", line);
    return v;
}

std::vector<double> to_list(std::string_view key, std::string_view text, int line) {
    std::vector<double> out;
    text = trim(text);
    if (text.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        out.push_back(to_double(key, text.substr(start, comma == std::string_view::npos ? text.npos : comma - start),
                                line));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

Vec3 to_vec3(std::string_view key, std::string_view text, int line) {
    const auto v = to_list(key, text, line);
    if (v.size() != 3) bad(key, "expected three comma-separated numbers", line);
    return {v[0], v[1], v[2]};
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += format_double(values[i]);
    }
    return out;
}

std::string vec3_text(const Vec3& v) { return join({v.x, v.y, v.z}); }

struct Field {
    FieldInfo info;
    std::function<void(Scenario&, std::string_view, int)> set;
    std::function<std::string(const Scenario&)> get;
};

template <class Member>
Field real_field(std::string_view key, Member member) {
    return {{key, true},
            [key, member](Scenario& s, std::string_view v, int line) { std::invoke(member, s) = to_double(key, v, line); },
            [member](const Scenario& s) { return format_double(std::invoke(member, s)); }};
}

template <class Member>
Field int_field(std::string_view key, Member member) {
    return {{key, true},
            [key, member](Scenario& s, std::string_view v, int line) {
                using T = std::remove_reference_t<decltype(std::invoke(member, s))>;
                std::invoke(member, s) = to_integer<T>(key, v, line);
            },
            [member](const Scenario& s) { return std::to_string(std::invoke(member, s)); }};
}

template <class Member>
Field list_field(std::string_view key, Member member) {
    return {{key, false},
            [key, member](Scenario& s, std::string_view v, int line) { std::invoke(member, s) = to_list(key, v, line); },
            [member](const Scenario& s) { return join(std::invoke(member, s)); }};
}

template <class E>
Field enum_field(std::string_view key, E Scenario::*member, std::vector<std::pair<std::string_view, E>> names) {
    return {{key, true},
            [key, member, names](Scenario& s, std::string_view v, int line) {
                v = trim(v);
                for (const auto& [name, value] : names)
                    if (name == v) {
                        s.*member = value;
                        return;
                    }
                std::string allowed;
                for (const auto& n : names) allowed += (allowed.empty() ? "" : "|") + std::string(n.first);
                bad(key, "expected one of " + allowed + ", got '" + std::string(v) + "'", line);
            },
            [member, names](const Scenario& s) {
                for (const auto& [name, value] : names)
                    if (value == s.*member) return std::string(name);
                return std::string("?");
            }};
}

const std::vector<Field>& registry() {
    using S = Scenario;
    static const std::vector<Field> fields = [] {
        std::vector<Field> f;
        f.push_back(int_field("node_count", &S::node_count));
        f.push_back({{"area_min", false},
                     [](S& s, std::string_view v, int line) { s.area.lo = to_vec3("area_min", v, line); },
                     [](const S& s) { return vec3_text(s.area.lo); }});
        f.push_back({{"area_max", false},
                     [](S& s, std::string_view v, int line) { s.area.hi = to_vec3("area_max", v, line); },
                     [](const S& s) { return vec3_text(s.area.hi); }});
        f.push_back({{"sink_position", false},
                     [](S& s, std::string_view v, int line) { s.sink_position = to_vec3("sink_position", v, line); },
                     [](const S& s) { return vec3_text(s.sink_position); }});
        f.push_back(real_field("mobile_fraction", &S::mobile_fraction));
        f.push_back({{"speed_range_mps", false},
                     [](S& s, std::string_view v, int line) {
                         const auto r = to_list("speed_range_mps", v, line);
                         if (r.size() != 2) bad("speed_range_mps", "expected 'min, max'", line);
                         s.speed_min_mps = r[0];
                         s.speed_max_mps = r[1];
                     },
                     [](const S& s) { return join({s.speed_min_mps, s.speed_max_mps}); }});
        f.push_back(real_field("direction_epoch_s", &S::direction_epoch_s));
        f.push_back(real_field("mobility_tick_s", &S::mobility_tick_s));
        f.push_back(real_field("initial_node_energy_j", &S::initial_node_energy_j));
        f.push_back(real_field("initial_sink_energy_j", &S::initial_sink_energy_j));
        f.push_back(real_field("tx_long_w", &S::tx_long_w));
        f.push_back(real_field("tx_short_w", &S::tx_short_w));
        f.push_back(real_field("rx_w", &S::rx_w));
        f.push_back(real_field("idle_w", &S::idle_w));
        f.push_back(real_field("aggregation_w", &S::aggregation_w));
        f.push_back(real_field("long_tx_threshold_m", &S::long_tx_threshold_m));
        f.push_back(real_field("node_range_m", &S::node_range_m));
        f.push_back(real_field("sink_range_m", &S::sink_range_m));
        f.push_back(real_field("frequency_khz", &S::frequency_khz));
        f.push_back(real_field("bandwidth_bps", &S::bandwidth_bps));
        f.push_back(list_field("channels_khz", &S::channels_khz));
        f.push_back(real_field("packet_rate_pps", &S::packet_rate_pps));
        f.push_back(int_field("data_packet_bytes", &S::data_packet_bytes));
        f.push_back(int_field("queue_capacity", &S::queue_capacity));
        f.push_back(int_field("max_hops", &S::max_hops));
        f.push_back(real_field("sim_duration_s", &S::sim_duration_s));
        f.push_back(int_field("seed", &S::seed));
        f.push_back(enum_field<Mode>("mode", &S::mode, {{"RPLUW", Mode::rpluw}, {"RPLUWM", Mode::rpluwm}}));
        f.push_back(real_field("temperature_celsius", [](auto& s) -> auto& { return s.environment.temperature_celsius; }));
        f.push_back(real_field("salinity_ppt", [](auto& s) -> auto& { return s.environment.salinity_ppt; }));
        f.push_back(real_field("ph", [](auto& s) -> auto& { return s.environment.ph; }));
        f.push_back(real_field("wind_speed_mps", [](auto& s) -> auto& { return s.environment.wind_speed_mps; }));
        f.push_back(real_field("shipping_factor", [](auto& s) -> auto& { return s.environment.shipping_factor; }));
        f.push_back(
            real_field("water_density_kg_m3", [](auto& s) -> auto& { return s.environment.water_density_kg_m3; }));
        f.push_back(real_field("gravity_mps2", [](auto& s) -> auto& { return s.environment.gravity_mps2; }));
        f.push_back(enum_field<channel::SoundSpeedMode>(
            "sound_speed_mode", &S::sound_speed_mode,
            {{"mackenzie-corrected", channel::SoundSpeedMode::mackenzie_corrected},
             {"literal", channel::SoundSpeedMode::literal}}));
        f.push_back(enum_field<TlModel>("tl_model", &S::tl_model,
                                        {{"auto", TlModel::automatic},
                                         {"shallow", TlModel::shallow},
                                         {"deep", TlModel::deep},
                                         {"practical", TlModel::practical}}));
        f.push_back(real_field("shallow_coefficient", [](auto& s) -> auto& { return s.propagation.shallow_coefficient; }));
        f.push_back(real_field("spreading_factor", [](auto& s) -> auto& { return s.propagation.spreading_factor; }));
        f.push_back(real_field("anomaly_db", [](auto& s) -> auto& { return s.propagation.anomaly_db; }));
        f.push_back(real_field("absorption_depth_m", [](auto& s) -> auto& { return s.propagation.absorption_depth_m; }));
        f.push_back({{"absorption", true},
                     [](S& s, std::string_view v, int line) {
                         v = trim(v);
                         if (v == "as-printed")
                             s.propagation.absorption = channel::AbsorptionVariant::as_printed;
                         else if (v == "ainslie-mccolm")
                             s.propagation.absorption = channel::AbsorptionVariant::ainslie_mccolm;
                         else
                             bad("absorption", "expected as-printed|ainslie-mccolm", line);
                     },
                     [](const S& s) {
                         return std::string(s.propagation.absorption == channel::AbsorptionVariant::as_printed
                                                ? "as-printed"
                                                : "ainslie-mccolm");
                     }});
        f.push_back(real_field("shallow_depth_threshold_m", &S::shallow_depth_threshold_m));
        f.push_back(real_field("snr_threshold_db", &S::snr_threshold_db));
        f.push_back(real_field("predetermined_lifetime_s", &S::predetermined_lifetime_s));
        f.push_back(real_field("convergence_window_s", &S::convergence_window_s));
        f.push_back(int_field("k_bar", &S::k_bar));
        f.push_back({{"rank_weights", false},
                     [](S& s, std::string_view v, int line) {
                         const auto w = to_list("rank_weights", v, line);
                         if (w.size() != 3) bad("rank_weights", "expected 'hop, depth, arssi'", line);
                         s.rank_weights = {w[0], w[1], w[2]};
                     },
                     [](const S& s) { return join({s.rank_weights.hop, s.rank_weights.depth, s.rank_weights.arssi}); }});
        f.push_back(list_field("criterion_weights", &S::criterion_weights));
        f.push_back(list_field("comparison_matrix", &S::comparison_matrix));
        f.push_back(int_field("trickle_i_min_ms", &S::trickle_i_min_ms));
        f.push_back(int_field("trickle_doublings", &S::trickle_doublings));
        f.push_back(int_field("inconsistency_threshold", &S::inconsistency_threshold));
        f.push_back(real_field("hysteresis", &S::hysteresis));
        f.push_back(real_field("lease_s", &S::lease_s));
        f.push_back(real_field("dao_refresh_s", &S::dao_refresh_s));
        return f;
    }();
    return fields;
}

const Field* find_field(std::string_view key) {
    for (const auto& f : registry())
        if (f.info.key == key) return &f;
    return nullptr;
}

}  // namespace

const std::vector<FieldInfo>& scenario_fields() {
    static const std::vector<FieldInfo> infos = [] {
        std::vector<FieldInfo> out;
        for (const auto& f : registry()) out.push_back(f.info);
        return out;
    }();
    return infos;
}

bool is_scenario_field(std::string_view key) { return find_field(key) != nullptr; }

void apply_field(Scenario& scenario, std::string_view key, std::string_view value, int line) {
    const Field* f = find_field(key);
    if (f == nullptr) bad(key, "unknown key", line);
    f->set(scenario, value, line);
}

std::string field_value(const Scenario& scenario, std::string_view key) {
    const Field* f = find_field(key);
    if (f == nullptr) throw ConfigError(std::string(key), std::string(key) + ": unknown key");
    return f->get(scenario);
}

std::vector<KeyValueLine> split_key_values(std::string_view text) {
    std::vector<KeyValueLine> out;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("", "expected 'key = value', got '" + std::string(line) + "'", line_no);
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("", "missing key before '='", line_no);
        out.push_back({line_no, std::string(key), std::string(trim(line.substr(eq + 1)))});
    }
    return out;
}

Scenario parse_scenario_text(std::string_view text) {
    Scenario s;
    for (const auto& kv : split_key_values(text)) apply_field(s, kv.key, kv.value, kv.line);
    s.validate();
    return s;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Scenario parse_scenario(const std::filesystem::path& path) { return parse_scenario_text(read_text_file(path)); }

std::string serialize_scenario(const Scenario& scenario) {
    std::string out;
    for (const auto& f : registry()) {
        out += f.info.key;
        out += " = ";
        out += f.get(scenario);
        out += '\n';
    }
    return out;
}

}  // namespace uwsim
