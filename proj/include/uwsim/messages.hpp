#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "uwsim/types.hpp"

namespace uwsim {

enum class MessageKind : std::uint8_t { dio, dao, dao_ack, dis, ns, na, rs, ra };
inline constexpr std::size_t kMessageKindCount = 8;

std::string_view kind_name(MessageKind kind) noexcept;
bool is_neighbor_discovery(MessageKind kind) noexcept;

/// Default on-air sizes in bytes.
int default_size_bytes(MessageKind kind) noexcept;

struct ControlMessage {
    MessageKind kind = MessageKind::dio;
    NodeId sender{};
    std::optional<NodeId> destination;  // empty for broadcast
    double rank = kInfiniteRank;
    double depth_m = 0.0;
    double arssi = 0.0;  // sender's smoothed level for the link to the destination, dB
    NodeId dodag_root = kSinkId;
    Vec3 root_position;
    std::uint16_t sequence = 0;
    int size_bytes = 0;

    int hop_count = 0;
    double residual_energy_j = 0.0;
    double path_delay_ms = 0.0;
    double path_etx = 0.0;
    bool no_path = false;        // DAO withdrawing the registration
    double lease_expiry_s = 0.0; // DAO-Ack: absolute time the parent's promise ends
    double send_time_s = 0.0;    // stamped by the engine when the frame goes on air
};

/// Serial-number comparison for 16-bit wrapping counters: true when `a` is
/// strictly newer than `b`.
constexpr bool serial_newer(std::uint16_t a, std::uint16_t b) noexcept {
    const auto diff = static_cast<std::uint16_t>(a - b);
    return diff != 0 && diff < 0x8000;
}

/// Forward distance from `b` to `a` in serial space.
constexpr int serial_gap(std::uint16_t a, std::uint16_t b) noexcept {
    return static_cast<std::uint16_t>(a - b);
}

}  // namespace uwsim
