#include "uwsim/trace.hpp"

#include "uwsim/scenario_io.hpp"

namespace uwsim {

std::string_view trace_kind_name(TraceKind kind) noexcept {
    switch (kind) {
        case TraceKind::tx: return "tx";
        case TraceKind::rx: return "rx";
        case TraceKind::collision: return "collision";
        case TraceKind::drop: return "drop";
        case TraceKind::timer: return "timer";
        case TraceKind::gen: return "gen";
        case TraceKind::deliver: return "deliver";
        case TraceKind::parent: return "parent";
        case TraceKind::rank: return "rank";
        case TraceKind::table: return "table";
        case TraceKind::trickle: return "trickle";
        case TraceKind::energy: return "energy";
        case TraceKind::death: return "death";
        case TraceKind::diag: return "diag";
    }
    return "?";
}

std::string render_record(const TraceRecord& r) {
    std::string line = format_double(r.time_s);
    line += ", ";
    line += std::to_string(to_index(r.node));
    line += ", ";
    line += trace_kind_name(r.kind);
    line += ", ";
    line += r.peer ? std::to_string(to_index(*r.peer)) : std::string("-");
    line += ", ";
    std::string detail(r.tag);
    auto add = [&](double v) {
        if (!detail.empty()) detail += ' ';
        detail += format_double(v);
    };
    switch (r.kind) {
        case TraceKind::collision:
        case TraceKind::drop:
        case TraceKind::timer:
        case TraceKind::death:
            break;
        case TraceKind::gen:
        case TraceKind::parent:
        case TraceKind::table:
        case TraceKind::trickle:
        case TraceKind::energy:
        case TraceKind::diag:
            add(r.v1);
            break;
        default:
            add(r.v1);
            add(r.v2);
            break;
    }
    line += detail.empty() ? "-" : detail;
    return line;
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace) {
    out << "time_s, node_id, event_kind, peer_id, detail\n";
    for (const auto& r : trace) out << render_record(r) << '\n';
}

}  // namespace uwsim
