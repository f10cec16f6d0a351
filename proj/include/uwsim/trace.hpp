#pragma once

// Event trace. Each record renders as `time_s, node_id, event_kind, peer_id, detail`
// with `-` for an absent peer.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "uwsim/types.hpp"

namespace uwsim {

enum class TraceKind : std::uint8_t {
    tx,         // tag = frame kind, v1 = bytes, v2 = no-path flag for DAOs
    rx,         // tag = frame kind, v1 = level dB, v2 = no-path flag for DAOs
    collision,  // tag = frame kind
    drop,       // tag = reason
    timer,      // tag = timer name
    gen,        // peer = origin, v1 = packet sequence
    deliver,    // peer = origin, v1 = packet sequence, v2 = creation time s
    parent,     // peer = new preferred parent (absent when lost), v1 = rank
    rank,       // v1 = old rank, v2 = new rank
    table,      // v1 = parent-table size
    trickle,    // v1 = interval ms
    energy,     // tag = category, v1 = joules debited
    death,
    diag,       // tag = diagnostic name, v1 = value
};

std::string_view trace_kind_name(TraceKind kind) noexcept;

struct TraceRecord {
    double time_s = 0.0;
    NodeId node{};
    TraceKind kind = TraceKind::tx;
    std::optional<NodeId> peer;
    std::string_view tag;  // always a static string
    double v1 = 0.0;
    double v2 = 0.0;
};

std::string render_record(const TraceRecord& record);
void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace);

}  // namespace uwsim
