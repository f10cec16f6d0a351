#include "uwsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uwsim/types.hpp"

namespace uwsim {

double compute_pdr(std::uint64_t sent, std::uint64_t received) {
    if (received > sent) throw DomainError("received packets exceed sent packets");
    if (sent == 0) return 100.0;
    return static_cast<double>(received) / static_cast<double>(sent) * 100.0;
}

double compute_altn(std::span<const double> death_times, int alive_count, int total, double lifetime_s) {
    if (total <= 0) throw DomainError("total node count must be positive");
    if (alive_count < 0 || alive_count > total || static_cast<int>(death_times.size()) != total - alive_count)
        throw DomainError("death list length must equal total - alive");
    double sum = 0.0;
    for (double t : death_times) {
        if (t > lifetime_s) throw DomainError("death time exceeds the predetermined lifetime");
        sum += t;
    }
    return (sum + alive_count * lifetime_s) / total;
}

DelayStats delay_stats(std::span<const std::pair<double, double>> send_arrive) {
    DelayStats out;
    if (send_arrive.empty()) return out;
    double sum = 0.0;
    for (const auto& [send, arrive] : send_arrive) {
        if (!(arrive > send)) throw DomainError("arrival must follow sending");
        sum += arrive - send;
    }
    const double n = static_cast<double>(send_arrive.size());
    const double mean = sum / n;
    double sq = 0.0;
    for (const auto& [send, arrive] : send_arrive) {
        const double d = (arrive - send) - mean;
        sq += d * d;
    }
    out.mean_s = mean;
    out.jitter_s = std::sqrt(sq / n);
    return out;
}

std::optional<double> lower_median(std::vector<double> values) {
    if (values.empty()) return std::nullopt;
    std::sort(values.begin(), values.end());
    return values[(values.size() - 1) / 2];
}

LifetimeConvergence lifetime_and_convergence(const std::vector<TraceRecord>& trace, int node_count,
                                             double duration_s, double window_s) {
    LifetimeConvergence out;
    std::vector<double> deaths;
    std::vector<char> joined(static_cast<std::size_t>(std::max(node_count, 0)), 0);
    std::vector<double> change_times;
    for (const auto& r : trace) {
        if (r.kind == TraceKind::death) deaths.push_back(r.time_s);
        if (r.kind == TraceKind::parent) {
            change_times.push_back(r.time_s);
            if (r.peer && to_index(r.node) < joined.size()) joined[to_index(r.node)] = 1;
        }
    }
    if (!deaths.empty()) {
        out.first_death_s = *std::min_element(deaths.begin(), deaths.end());
        out.median_death_s = lower_median(deaths);
    }
    if (node_count <= 1) {
        out.convergence_time_s = 0.0;
        return out;
    }

    std::vector<char> has_parent(joined.size(), 0);
    std::vector<char> dead(joined.size(), 0);
    long missing = std::count(joined.begin(), joined.end(), 1);

    auto quiet_after = [&](double t) {
        const auto next = std::upper_bound(change_times.begin(), change_times.end(), t);
        return next == change_times.end() || *next > t + window_s;
    };
    auto check = [&](double t) { return missing == 0 && t + window_s <= duration_s && quiet_after(t); };

    if (check(0.0)) {
        out.convergence_time_s = 0.0;
        return out;
    }
    std::size_t i = 0;
    while (i < trace.size()) {
        const double t = trace[i].time_s;
        bool relevant = false;
        for (; i < trace.size() && trace[i].time_s == t; ++i) {
            const auto& r = trace[i];
            const auto n = to_index(r.node);
            if (n >= joined.size()) continue;
            if (r.kind == TraceKind::parent) {
                relevant = true;
                const char now_has = r.peer ? 1 : 0;
                if (joined[n] && !dead[n] && now_has != has_parent[n]) missing += now_has ? -1 : 1;
                has_parent[n] = now_has;
            } else if (r.kind == TraceKind::death) {
                relevant = true;
                if (joined[n] && !dead[n] && !has_parent[n]) --missing;
                dead[n] = 1;
            }
        }
        if (relevant && check(t)) {
            out.convergence_time_s = t;
            return out;
        }
        if (t + window_s > duration_s) break;
    }
    return out;
}

std::vector<double> ledger_debits(const std::vector<TraceRecord>& trace, int node_count) {
    std::vector<CompensatedSum> sums(static_cast<std::size_t>(node_count));
    for (const auto& r : trace)
        if (r.kind == TraceKind::energy && to_index(r.node) < sums.size()) sums[to_index(r.node)].add(r.v1);
    std::vector<double> out;
    out.reserve(sums.size());
    for (const auto& s : sums) out.push_back(s.value());
    return out;
}

MetricsReport build_report(const std::vector<TraceRecord>& trace, const ReportInputs& in) {
    MetricsReport m;
    std::vector<double> deaths;
    std::vector<std::pair<double, double>> delays;
    for (const auto& r : trace) {
        switch (r.kind) {
            case TraceKind::gen: ++m.data_generated; break;
            case TraceKind::deliver:
                ++m.data_delivered;
                delays.emplace_back(r.v2, r.time_s);
                break;
            case TraceKind::tx:
                if (r.tag != "DATA") ++m.control_overhead_packets;
                break;
            case TraceKind::death: deaths.push_back(r.time_s); break;
            default: break;
        }
    }
    m.pdr_percent = compute_pdr(m.data_generated, m.data_delivered);
    m.alive_node_count = in.node_count - static_cast<int>(deaths.size());
    m.altn_s = compute_altn(deaths, m.alive_node_count, in.node_count, in.lifetime_s);
    const auto d = delay_stats(delays);
    m.mean_e2e_delay_s = d.mean_s;
    m.delay_jitter_s = d.jitter_s;
    const auto lc = lifetime_and_convergence(trace, in.node_count, in.duration_s, in.convergence_window_s);
    m.first_death_s = lc.first_death_s;
    m.median_death_s = lc.median_death_s;
    m.convergence_time_s = lc.convergence_time_s;
    for (std::size_t i = 0; i < in.residual_energy_j.size(); ++i)
        m.per_node_energy_j[static_cast<std::uint32_t>(i)] = in.residual_energy_j[i];
    return m;
}

std::string check_report(const MetricsReport& r, double lifetime_s) {
    if (!(r.pdr_percent >= 0.0 && r.pdr_percent <= 100.0)) return "pdr_percent outside [0, 100]";
    if (!(r.altn_s <= lifetime_s + 1e-9)) return "altn_s exceeds the predetermined lifetime";
    if (r.first_death_s && r.median_death_s && *r.first_death_s > *r.median_death_s)
        return "first_death_s after median_death_s";
    if (r.data_delivered > r.data_generated) return "more packets delivered than generated";
    if (r.alive_node_count < 0) return "negative alive_node_count";
    if (r.delay_jitter_s && *r.delay_jitter_s < 0.0) return "negative delay_jitter_s";
    return {};
}

}  // namespace uwsim
