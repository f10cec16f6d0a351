#pragma once

// Per-node RPLUW / RPLUWM state machine. Every entry point takes the node's
// state by reference, mutates it, and returns the frames the node wants to send.
// Timers are absolute deadlines stored in the state; the engine schedules them
// and discards expiries whose deadline no longer matches.
//
// Loop freedom rests on parent leases: a DAO-Ack promises the child that the
// parent's rank will not rise before `lease_expiry_s`, and a node holding any
// child lease only ever lowers its rank. A child therefore always sees an
// upper bound of its parent's true rank, and choosing rank > that bound keeps
// every preferred-parent edge strictly rank-decreasing.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "uwsim/madm.hpp"
#include "uwsim/messages.hpp"
#include "uwsim/trickle.hpp"
#include "uwsim/types.hpp"

namespace uwsim {

enum class Mode { rpluw, rpluwm };

std::string_view mode_name(Mode mode) noexcept;

enum class TimerKind : std::uint8_t {
    trickle,       // trickle interval end
    dio_send,      // jittered DIO transmission inside an interval
    linkage,       // L_t
    probe,         // NS sent to the preferred parent, waiting for NA
    mobility,      // M_t
    response,      // R_t
    dao_refresh,   // periodic lease renewal
    housekeeping,  // next lease / pending-DAO expiry
    detach_hold,   // grace period before a parentless node with children poisons
};
inline constexpr std::size_t kTimerCount = 9;

std::string_view timer_name(TimerKind kind) noexcept;

inline constexpr double kDisarmed = std::numeric_limits<double>::infinity();

struct RankWeights {
    double hop = 0.5;
    double depth = 0.3;
    double arssi = 0.2;
};

struct ProtocolConfig {
    Mode mode = Mode::rpluwm;
    std::size_t k_bar = 4;
    std::vector<double> criterion_weights;  // one per madm criterion; empty means AHP on the default matrix
    RankWeights rank_weights;
    double max_depth_m = 500.0;

    double snr_threshold_db = 10.0;          // DAO-Ack link-quality threshold
    double band_noise_db = 0.0;              // noise over the receiver band, used to map ARSSI to SNR
    double mobility_snr_threshold_db = 10.0; // M_t exploration threshold
    double arssi_beta = 0.3;

    std::int64_t trickle_i_min_ms = 4096;
    int trickle_doublings = 4;
    int inconsistency_threshold = 1;
    double rank_change_tolerance = 0.1;

    double response_max_delay_s = 1.0;
    double mobility_period_s = 10.0;
    double lease_s = 90.0;
    double lease_margin_s = 10.0;
    double dao_refresh_s = 30.0;
    double dao_timeout_s = 5.0;
    double detach_hold_s = 2.0;
    double probe_timeout_s = 2.0;
    double neighbor_timeout_factor = 3.0;  // candidates must be heard within factor * I_max
    double hysteresis = 0.05;

    double i_max_s() const noexcept;
    /// Throws ConfigError naming the first invalid field.
    void validate() const;
};

struct NeighborInfo {
    double rank = kInfiniteRank;
    double depth_m = 0.0;
    int hop_count = 0;
    double residual_energy_j = 0.0;
    double path_delay_ms = 0.0;
    double path_etx = 0.0;
    NodeId root = kSinkId;
    double link_delay_ms = 0.0;
    double link_pdr = 1.0;
    std::optional<std::uint16_t> last_dio_sequence;
    double last_advert_s = -kInfiniteRank;
    double last_heard_s = -kInfiniteRank;
    bool reachable = false;
    bool advertised = false;  // at least one DIO / RA / DAO-Ack seen
    double dao_backoff_until_s = -kInfiniteRank;
    double view_since_s = -kInfiniteRank;  // send time of the DAO-Ack that opened the current lease
};

struct NodeState {
    NodeId node_id{};
    Vec3 position;
    double depth_m = 0.0;
    bool is_sink = false;
    bool is_mobile = false;
    bool alive = true;

    double rank = kInfiniteRank;
    std::vector<madm::ParentRecord> parent_table;  // best first, at most k_bar
    std::optional<NodeId> preferred_parent;
    std::vector<Vec3> dodag_root_list;
    TrickleState trickle;
    std::array<double, kTimerCount> timers{};
    double residual_energy_j = 0.0;
    std::map<NodeId, double> arssi_by_neighbor;

    std::map<NodeId, NeighborInfo> neighbors;
    std::map<NodeId, double> confirmed;    // parent -> lease end promised by the parent
    std::map<NodeId, double> pending_dao;  // parent -> time the DAO is given up on
    std::map<NodeId, double> children;     // child -> lease end kept by this node
    bool poisoning = false;
    std::optional<NodeId> probe_target;

    std::array<std::uint16_t, kMessageKindCount> next_sequence{};
    std::map<NodeId, std::array<std::optional<std::uint16_t>, kMessageKindCount>> last_sequence;

    NodeState();

    double timer(TimerKind kind) const noexcept { return timers[static_cast<std::size_t>(kind)]; }
    double& timer(TimerKind kind) noexcept { return timers[static_cast<std::size_t>(kind)]; }
    double linkage_timer_s() const noexcept { return timer(TimerKind::linkage); }
    double mobility_timer_s() const noexcept { return timer(TimerKind::mobility); }
    double response_timer_s() const noexcept { return timer(TimerKind::response); }

    /// Attached nodes advertise and accept children.
    bool attached() const noexcept { return is_sink || preferred_parent.has_value(); }
};

struct Outputs {
    std::vector<ControlMessage> messages;
};

using Rng = std::mt19937_64;

double compute_rank(double parent_rank, int hop_increment, double own_depth_m, double parent_depth_m,
                    double arssi_norm, const RankWeights& weights, double max_depth_m);

/// ARSSI level mapped to [0, 1]: 0 at the SNR threshold, 1 at 60 dB above it.
double arssi_norm(double arssi_db, double band_noise_db, double snr_threshold_db) noexcept;

/// Exponential smoothing; the first sample initialises.
void update_arssi(NodeState& state, NodeId neighbor, double rssi_sample, double beta = 0.3);

/// Weights used for parent scoring under `config`.
std::vector<double> effective_criterion_weights(const ProtocolConfig& config);

NodeState make_node(NodeId id, const Vec3& position, bool is_sink, bool is_mobile, double energy_j,
                    const ProtocolConfig& config);

/// Called once at t = `now_s`. The sink starts advertising; other nodes arm discovery.
Outputs start_node(NodeState& state, double now_s, const ProtocolConfig& config, Rng& rng);

/// Bookkeeping for every decoded frame from `sender`, addressed to us or not.
void on_frame_heard(NodeState& state, NodeId sender, double level_db, double now_s, const ProtocolConfig& config);

Outputs process_control_message(NodeState& state, const ControlMessage& msg, double now_s,
                                const ProtocolConfig& config, Rng& rng);

Outputs neighbor_discovery_step(NodeState& state, const ControlMessage& msg, double now_s,
                                const ProtocolConfig& config, Rng& rng);

Outputs timer_expiry(NodeState& state, TimerKind timer, double now_s, const ProtocolConfig& config, Rng& rng);

/// Candidate parent rows as seen right now (before k_bar truncation).
std::vector<madm::ParentRecord> candidate_parents(const NodeState& state, double now_s, const ProtocolConfig& config);

}  // namespace uwsim
