#include "uwsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <queue>

#include "uwsim/rng.hpp"
#include "uwsim/simd.hpp"

namespace uwsim {

std::vector<NodeState> generate_topology(const Scenario& scenario) {
    if (!(scenario.area.volume() > 0.0)) throw ConfigError("area", "area: deployment box has zero volume");
    if (scenario.node_count < 1) throw ConfigError("node_count", "node_count: must be >= 1");
    const ProtocolConfig config = protocol_config(scenario);

    std::vector<int> order;
    for (int i = 1; i < scenario.node_count; ++i) order.push_back(i);
    Rng pick = make_stream(scenario.seed, kNetworkOwner, Stream::selection);
    std::shuffle(order.begin(), order.end(), pick);
    std::vector<char> mobile(static_cast<std::size_t>(scenario.node_count), 0);
    for (int k = 0; k < scenario.mobile_count(); ++k) mobile[static_cast<std::size_t>(order[k])] = 1;

    std::vector<NodeState> nodes;
    nodes.reserve(static_cast<std::size_t>(scenario.node_count));
    nodes.push_back(make_node(kSinkId, scenario.sink_position, true, false, scenario.initial_sink_energy_j, config));
    const Box& a = scenario.area;
    for (int i = 1; i < scenario.node_count; ++i) {
        Rng rng = make_stream(scenario.seed, static_cast<std::uint64_t>(i), Stream::placement);
        std::uniform_real_distribution<double> ux(a.lo.x, a.hi.x), uy(a.lo.y, a.hi.y), uz(a.lo.z, a.hi.z);
        const double x = ux(rng);
        const double y = uy(rng);
        const double z = uz(rng);
        nodes.push_back(make_node(node_id(static_cast<std::uint32_t>(i)), {x, y, z}, false,
                                  mobile[static_cast<std::size_t>(i)] != 0, scenario.initial_node_energy_j, config));
    }
    return nodes;
}

namespace {

Vec3 random_velocity(Rng& rng, const Scenario& s) {
    std::uniform_real_distribution<double> uz(-1.0, 1.0);
    std::uniform_real_distribution<double> uphi(0.0, 2.0 * std::numbers::pi);
    const double z = uz(rng);
    const double phi = uphi(rng);
    const double speed = s.speed_max_mps > s.speed_min_mps
                             ? std::uniform_real_distribution<double>(s.speed_min_mps, s.speed_max_mps)(rng)
                             : s.speed_min_mps;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {speed * r * std::cos(phi), speed * r * std::sin(phi), speed * z};
}

void maybe_turn(MobilityState& m, double now_s, Rng& rng, const Scenario& s) {
    if (now_s >= m.next_turn_s) {
        m.velocity = random_velocity(rng, s);
        m.next_turn_s = now_s + s.direction_epoch_s;
    }
}

}  // namespace

void mobility_step(NodeState& node, MobilityState& m, double now_s, double dt_s, Rng& rng, const Scenario& s) {
    if (!node.is_mobile || !node.alive) return;
    maybe_turn(m, now_s, rng, s);
    double px = node.position.x, py = node.position.y, pz = node.position.z;
    double vx = m.velocity.x, vy = m.velocity.y, vz = m.velocity.z;
    simd::scalar::advance_positions({{&px, 1}, {&py, 1}, {&pz, 1}}, {{&vx, 1}, {&vy, 1}, {&vz, 1}}, dt_s, s.area);
    node.position = {px, py, pz};
    node.depth_m = pz;
    m.velocity = {vx, vy, vz};
}

LinkBudget link_budget(const Scenario& s, double tx_power_w, const Vec3& from, bool from_sink, const Vec3& to,
                       bool to_sink) {
    LinkBudget b;
    b.distance_m = distance(from, to);
    b.in_range = b.distance_m <= s.range_between(from_sink, to_sink);
    const double mean_depth = 0.5 * (from.z + to.z);
    b.level_db = received_level_db(s, tx_power_w, b.distance_m, mean_depth);
    b.snr_db = b.level_db - scenario_band_noise_db(s);
    b.propagation_s = b.distance_m / channel::sound_speed(s.environment, mean_depth, s.sound_speed_mode);
    return b;
}

double tx_power_for(const Scenario& s, std::optional<double> unicast_distance_m) {
    if (!unicast_distance_m || *unicast_distance_m > s.long_tx_threshold_m) return s.tx_long_w;
    return s.tx_short_w;
}

std::vector<LinkOutcome> transmit(const NodeState& sender, std::span<const NodeState> nodes, int size_bytes,
                                  std::optional<NodeId> destination, double now_s, const Scenario& s) {
    std::vector<LinkOutcome> out;
    if (!sender.alive || !(sender.residual_energy_j > 0.0)) return out;
    std::optional<double> unicast;
    if (destination) {
        for (const auto& n : nodes)
            if (n.node_id == *destination) unicast = distance(sender.position, n.position);
    }
    const double power = tx_power_for(s, unicast);
    const double duration = size_bytes * 8.0 / s.bandwidth_bps;
    for (const auto& n : nodes) {
        if (n.node_id == sender.node_id || !n.alive) continue;
        const LinkBudget b = link_budget(s, power, sender.position, sender.is_sink, n.position, n.is_sink);
        if (!b.in_range) continue;
        out.push_back({n.node_id, b.snr_db >= s.snr_threshold_db, now_s + b.propagation_s + duration, b.level_db,
                       b.snr_db});
    }
    return out;
}

namespace {

struct DataPacket {
    NodeId origin{};
    std::uint32_t sequence = 0;
    double created_s = 0.0;
    int hops = 0;
};

struct Frame {
    NodeId sender{};
    bool is_data = false;
    ControlMessage control;
    DataPacket data;
    std::optional<NodeId> destination;
    int size_bytes = 0;
    double duration_s = 0.0;
    double power_w = 0.0;
};

struct Reception {
    std::uint32_t frame = 0;
    double level_db = 0.0;
    bool corrupted = false;
};

enum class EventType : std::uint8_t { start, timer, tx_end, rx_start, rx_end, data_gen, mobility, exhaustion };

struct Event {
    double time_s;
    std::uint64_t seq;
    EventType type;
    std::uint32_t node;
    std::uint32_t aux;  // timer kind or frame index
    double level_db;
};

struct EventLater {
    bool operator()(const Event& a, const Event& b) const noexcept {
        if (a.time_s != b.time_s) return a.time_s > b.time_s;
        return a.seq > b.seq;
    }
};

struct Runtime {
    Rng protocol_rng;
    Rng traffic_rng;
    Rng mobility_rng;
    double initial_j = 0.0;
    CompensatedSum consumed;
    double idle_since_s = 0.0;
    double exhausted_at_s = kDisarmed;  // projected idle-only depletion time
    std::deque<Frame> queue;
    std::deque<DataPacket> parked;
    bool busy = false;
    std::vector<Reception> receiving;
    std::array<double, kTimerCount> scheduled{};
    MobilityState mobility;
    std::uint32_t next_data_sequence = 0;

    std::optional<NodeId> last_preferred;
    double last_rank = kInfiniteRank;
    std::vector<NodeId> last_table;
    std::int64_t last_interval_ms = 0;
    bool last_trickle_running = false;
};

class Simulation {
public:
    explicit Simulation(const Scenario& s)
        : s_(s), config_(protocol_config(s)), nodes_(generate_topology(s)), noise_db_(scenario_band_noise_db(s)) {
        const std::size_t n = nodes_.size();
        rt_.resize(n);
        xs_.resize(n);
        ys_.resize(n);
        zs_.resize(n);
        vx_.assign(n, 0.0);
        vy_.assign(n, 0.0);
        vz_.assign(n, 0.0);
        d2_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto owner = static_cast<std::uint64_t>(i);
            rt_[i].protocol_rng = make_stream(s.seed, owner, Stream::protocol);
            rt_[i].traffic_rng = make_stream(s.seed, owner, Stream::traffic);
            rt_[i].mobility_rng = make_stream(s.seed, owner, Stream::mobility);
            rt_[i].initial_j = nodes_[i].residual_energy_j;
            rt_[i].scheduled.fill(kDisarmed);
            rt_[i].last_rank = nodes_[i].rank;
            xs_[i] = nodes_[i].position.x;
            ys_[i] = nodes_[i].position.y;
            zs_[i] = nodes_[i].position.z;
        }
    }

    RunResult run() {
        const ResolvedWeights weights = resolve_weights(s_);
        if (weights.consistency_ratio > 0.1)
            record(0.0, kSinkId, TraceKind::diag, std::nullopt, "consistency_ratio", weights.consistency_ratio);

        for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
            push(0.0, EventType::start, i);
            project_exhaustion(i);
            if (!nodes_[i].is_sink) schedule_next_data(i, 0.0);
        }
        if (s_.mobile_count() > 0) push(s_.mobility_tick_s, EventType::mobility, 0);

        double clock = 0.0;
        while (!events_.empty()) {
            const Event ev = events_.top();
            if (ev.time_s > s_.sim_duration_s) break;
            events_.pop();
            if (ev.time_s < clock) ++safety_.clock_regressions;
            clock = ev.time_s;
            ++processed_;
            dispatch(ev);
        }

        for (std::uint32_t i = 0; i < nodes_.size(); ++i) settle_idle(i, s_.sim_duration_s);

        RunResult result;
        result.energy.reserve(nodes_.size());
        ReportInputs inputs;
        inputs.node_count = static_cast<int>(nodes_.size());
        inputs.duration_s = s_.sim_duration_s;
        inputs.lifetime_s = s_.predetermined_lifetime_s;
        inputs.convergence_window_s = s_.convergence_window_s;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const double residual = residual_of(static_cast<std::uint32_t>(i));
            result.energy.push_back({rt_[i].initial_j, residual});
            inputs.residual_energy_j.push_back(residual);
        }
        result.report = build_report(trace_, inputs);
        result.safety = safety_;
        result.events_processed = processed_;
        result.trace = std::move(trace_);
        return result;
    }

private:
    // ---- bookkeeping -------------------------------------------------------

    void push(double t, EventType type, std::uint32_t node, std::uint32_t aux = 0, double level = 0.0) {
        events_.push(Event{t, seq_++, type, node, aux, level});
    }

    void record(double t, NodeId node, TraceKind kind, std::optional<NodeId> peer, std::string_view tag = {},
                double v1 = 0.0, double v2 = 0.0) {
        trace_.push_back(TraceRecord{t, node, kind, peer, tag, v1, v2});
    }

    double residual_of(std::uint32_t i) const { return rt_[i].initial_j - rt_[i].consumed.value(); }

    // ---- energy ------------------------------------------------------------

    void die(std::uint32_t i, double t) {
        NodeState& n = nodes_[i];
        if (!n.alive) return;
        n.alive = false;
        n.residual_energy_j = residual_of(i);
        rt_[i].queue.clear();
        rt_[i].parked.clear();
        rt_[i].receiving.clear();
        vx_[i] = vy_[i] = vz_[i] = 0.0;
        record(t, n.node_id, TraceKind::death, std::nullopt);
        check_invariants();
    }

    /// Debits `amount` or, if the node cannot afford it, whatever is left and kills it.
    bool debit(std::uint32_t i, double t, double amount, std::string_view category) {
        if (!nodes_[i].alive) return false;
        const double left = residual_of(i);
        if (amount >= left) {
            if (left > 0.0) {
                rt_[i].consumed.add(left);
                record(t, nodes_[i].node_id, TraceKind::energy, std::nullopt, category, left);
            }
            die(i, t);
            return false;
        }
        rt_[i].consumed.add(amount);
        record(t, nodes_[i].node_id, TraceKind::energy, std::nullopt, category, amount);
        nodes_[i].residual_energy_j = residual_of(i);
        project_exhaustion(i);
        return true;
    }

    /// Keeps one pending event at the instant idle drain alone would empty the battery.
    void project_exhaustion(std::uint32_t i) {
        if (s_.idle_w <= 0.0 || !nodes_[i].alive) return;
        const double at = rt_[i].idle_since_s + residual_of(i) / s_.idle_w;
        if (at == rt_[i].exhausted_at_s) return;
        rt_[i].exhausted_at_s = at;
        push(at, EventType::exhaustion, i);
    }

    void on_exhaustion(const Event& ev) {
        const std::uint32_t i = ev.node;
        if (!nodes_[i].alive || rt_[i].exhausted_at_s != ev.time_s) return;
        // Rounding can leave a sliver after the idle debit; it goes with the node.
        if (settle_idle(i, ev.time_s)) debit(i, ev.time_s, residual_of(i), "idle");
    }

    bool settle_idle(std::uint32_t i, double t) {
        if (!nodes_[i].alive) return false;
        const double dt = t - rt_[i].idle_since_s;
        rt_[i].idle_since_s = t;
        if (dt <= 0.0 || s_.idle_w <= 0.0) return true;
        const double amount = s_.idle_w * dt;
        return debit(i, t, amount, "idle");
    }

    // ---- MAC ---------------------------------------------------------------

    std::size_t backlog(std::uint32_t i) const { return rt_[i].queue.size() + rt_[i].parked.size(); }

    void enqueue(std::uint32_t i, Frame frame, double t) {
        if (backlog(i) >= static_cast<std::size_t>(s_.queue_capacity)) {
            record(t, nodes_[i].node_id, TraceKind::drop, frame.destination, "queue");
            return;
        }
        rt_[i].queue.push_back(std::move(frame));
    }

    Frame control_frame(const NodeState& n, const ControlMessage& m) const {
        Frame f;
        f.sender = n.node_id;
        f.control = m;
        f.destination = m.destination;
        f.size_bytes = m.size_bytes;
        return f;
    }

    Frame data_frame(const NodeState& n, const DataPacket& p) const {
        Frame f;
        f.sender = n.node_id;
        f.is_data = true;
        f.data = p;
        f.size_bytes = s_.data_packet_bytes;
        return f;
    }

    void try_send(std::uint32_t i, double t) {
        NodeState& n = nodes_[i];
        Runtime& r = rt_[i];
        while (n.alive && !r.busy && !r.queue.empty()) {
            Frame f = std::move(r.queue.front());
            r.queue.pop_front();
            if (f.is_data) {
                if (!n.preferred_parent) {
                    r.parked.push_back(f.data);
                    continue;
                }
                f.destination = n.preferred_parent;
            }
            std::optional<double> unicast;
            if (f.destination) unicast = distance(n.position, nodes_[to_index(*f.destination)].position);
            f.power_w = tx_power_for(s_, unicast);
            f.duration_s = f.size_bytes * 8.0 / s_.bandwidth_bps;
            if (!settle_idle(i, t) || !debit(i, t, f.power_w * f.duration_s, "tx")) return;

            f.control.send_time_s = t;
            for (auto& rx : r.receiving) rx.corrupted = true;  // half duplex
            r.busy = true;
            const std::string_view tag = f.is_data ? std::string_view("DATA") : kind_name(f.control.kind);
            record(t, n.node_id, TraceKind::tx, f.destination, tag, f.size_bytes,
                   (!f.is_data && f.control.no_path) ? 1.0 : 0.0);

            const auto index = static_cast<std::uint32_t>(frames_.size());
            frames_.push_back(std::move(f));
            push(t + frames_.back().duration_s, EventType::tx_end, i);
            fan_out(i, index, t);
        }
    }

    void fan_out(std::uint32_t i, std::uint32_t index, double t) {
        const Frame& f = frames_[index];
        const NodeState& sender = nodes_[i];
        simd::squared_distances({xs_, ys_, zs_}, sender.position, d2_);
        bool reaches_destination = !f.destination;
        for (std::uint32_t j = 0; j < nodes_.size(); ++j) {
            if (j == i || !nodes_[j].alive) continue;
            const double range = s_.range_between(sender.is_sink, nodes_[j].is_sink);
            if (d2_[j] > range * range) continue;
            if (f.destination && *f.destination == nodes_[j].node_id) reaches_destination = true;
            const double d = std::sqrt(d2_[j]);
            const double mean_depth = 0.5 * (sender.position.z + nodes_[j].position.z);
            const double level = received_level_db(s_, f.power_w, d, mean_depth);
            const double prop = d / channel::sound_speed(s_.environment, mean_depth, s_.sound_speed_mode);
            push(t + prop, EventType::rx_start, j, index, level);
            push(t + prop + f.duration_s, EventType::rx_end, j, index, level);
        }
        if (!reaches_destination) record(t, sender.node_id, TraceKind::drop, f.destination, "unreachable");
    }

    // ---- events ------------------------------------------------------------

    void dispatch(const Event& ev) {
        switch (ev.type) {
            case EventType::start: on_start(ev); break;
            case EventType::timer: on_timer(ev); break;
            case EventType::tx_end:
                rt_[ev.node].busy = false;
                try_send(ev.node, ev.time_s);
                break;
            case EventType::rx_start: on_rx_start(ev); break;
            case EventType::rx_end: on_rx_end(ev); break;
            case EventType::data_gen: on_data(ev); break;
            case EventType::mobility: on_mobility(ev); break;
            case EventType::exhaustion: on_exhaustion(ev); break;
        }
    }

    void on_start(const Event& ev) {
        const std::uint32_t i = ev.node;
        if (nodes_[i].is_mobile) {
            rt_[i].mobility.next_turn_s = 0.0;
            maybe_turn(rt_[i].mobility, ev.time_s, rt_[i].mobility_rng, s_);
            vx_[i] = rt_[i].mobility.velocity.x;
            vy_[i] = rt_[i].mobility.velocity.y;
            vz_[i] = rt_[i].mobility.velocity.z;
        }
        Outputs out = start_node(nodes_[i], ev.time_s, config_, rt_[i].protocol_rng);
        after_protocol(i, std::move(out), ev.time_s);
    }

    void on_timer(const Event& ev) {
        const std::uint32_t i = ev.node;
        const auto kind = static_cast<TimerKind>(ev.aux);
        NodeState& n = nodes_[i];
        if (rt_[i].scheduled[ev.aux] == ev.time_s) rt_[i].scheduled[ev.aux] = kDisarmed;
        if (!n.alive || n.timer(kind) != ev.time_s) return;
        if (!settle_idle(i, ev.time_s)) return;
        record(ev.time_s, n.node_id, TraceKind::timer, std::nullopt, timer_name(kind));
        Outputs out = timer_expiry(n, kind, ev.time_s, config_, rt_[i].protocol_rng);
        after_protocol(i, std::move(out), ev.time_s);
    }

    void on_rx_start(const Event& ev) {
        const std::uint32_t j = ev.node;
        if (!nodes_[j].alive) return;
        Runtime& r = rt_[j];
        bool corrupted = r.busy;
        if (!r.receiving.empty()) {
            corrupted = true;
            for (auto& rx : r.receiving) rx.corrupted = true;
        }
        r.receiving.push_back({ev.aux, ev.level_db, corrupted});
    }

    void on_rx_end(const Event& ev) {
        const std::uint32_t j = ev.node;
        NodeState& n = nodes_[j];
        Runtime& r = rt_[j];
        const auto it = std::find_if(r.receiving.begin(), r.receiving.end(),
                                     [&](const Reception& rx) { return rx.frame == ev.aux; });
        if (it == r.receiving.end()) return;  // receiver died meanwhile
        const Reception rx = *it;
        r.receiving.erase(it);
        if (!n.alive) return;

        const Frame& f = frames_[ev.aux];
        if (!settle_idle(j, ev.time_s) || !debit(j, ev.time_s, s_.rx_w * f.duration_s, "rx")) return;

        const bool intended = !f.destination || *f.destination == n.node_id;
        const std::string_view tag = f.is_data ? std::string_view("DATA") : kind_name(f.control.kind);
        if (rx.corrupted) {
            if (intended) record(ev.time_s, n.node_id, TraceKind::collision, f.sender, tag);
            return;
        }
        if (rx.level_db - noise_db_ < s_.snr_threshold_db) {
            if (intended) record(ev.time_s, n.node_id, TraceKind::drop, f.sender, "snr");
            return;
        }
        if (intended)
            record(ev.time_s, n.node_id, TraceKind::rx, f.sender, tag, rx.level_db,
                   (!f.is_data && f.control.no_path) ? 1.0 : 0.0);

        on_frame_heard(n, f.sender, rx.level_db, ev.time_s, config_);
        if (!f.is_data) {
            const ControlMessage msg = f.control;  // frames_ may reallocate below
            Outputs out = process_control_message(n, msg, ev.time_s, config_, rt_[j].protocol_rng);
            after_protocol(j, std::move(out), ev.time_s);
            return;
        }
        sync_timers(j);
        if (!intended) return;

        DataPacket p = f.data;
        const double duration = f.duration_s;
        if (n.is_sink) {
            record(ev.time_s, n.node_id, TraceKind::deliver, p.origin, {}, p.sequence, p.created_s);
            return;
        }
        if (++p.hops > s_.max_hops) {
            record(ev.time_s, n.node_id, TraceKind::drop, p.origin, "hops");
            return;
        }
        if (s_.aggregation_w > 0.0 && !debit(j, ev.time_s, s_.aggregation_w * duration, "aggregation")) return;
        enqueue(j, data_frame(n, p), ev.time_s);
        try_send(j, ev.time_s);
    }

    void schedule_next_data(std::uint32_t i, double now) {
        std::exponential_distribution<double> gap(s_.packet_rate_pps);
        const double t = now + gap(rt_[i].traffic_rng);
        if (t <= s_.sim_duration_s) push(t, EventType::data_gen, i);
    }

    void on_data(const Event& ev) {
        const std::uint32_t i = ev.node;
        NodeState& n = nodes_[i];
        if (!n.alive) return;
        schedule_next_data(i, ev.time_s);
        DataPacket p{n.node_id, rt_[i].next_data_sequence++, ev.time_s, 0};
        record(ev.time_s, n.node_id, TraceKind::gen, n.node_id, {}, p.sequence);
        enqueue(i, data_frame(n, p), ev.time_s);
        try_send(i, ev.time_s);
    }

    void on_mobility(const Event& ev) {
        const double t = ev.time_s;
        simd::advance_positions({xs_, ys_, zs_}, {vx_, vy_, vz_}, s_.mobility_tick_s, s_.area);
        for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
            NodeState& n = nodes_[i];
            n.position = {xs_[i], ys_[i], zs_[i]};
            n.depth_m = zs_[i];
            if (!s_.area.contains(n.position)) ++safety_.positions_outside_area;
            if (!n.is_mobile || !n.alive) continue;
            MobilityState& m = rt_[i].mobility;
            m.velocity = {vx_[i], vy_[i], vz_[i]};
            maybe_turn(m, t, rt_[i].mobility_rng, s_);
            vx_[i] = m.velocity.x;
            vy_[i] = m.velocity.y;
            vz_[i] = m.velocity.z;
        }
        if (t + s_.mobility_tick_s <= s_.sim_duration_s) push(t + s_.mobility_tick_s, EventType::mobility, 0);
    }

    // ---- protocol glue -----------------------------------------------------

    void sync_timers(std::uint32_t i) {
        NodeState& n = nodes_[i];
        Runtime& r = rt_[i];
        for (std::size_t k = 0; k < kTimerCount; ++k) {
            const double deadline = n.timers[k];
            if (deadline == r.scheduled[k]) continue;
            r.scheduled[k] = deadline;
            if (deadline != kDisarmed) push(deadline, EventType::timer, i, static_cast<std::uint32_t>(k));
        }
    }

    void after_protocol(std::uint32_t i, Outputs out, double t) {
        NodeState& n = nodes_[i];
        Runtime& r = rt_[i];
        for (const auto& m : out.messages) enqueue(i, control_frame(n, m), t);
        sync_timers(i);

        bool topology_changed = false;
        if (n.preferred_parent != r.last_preferred) {
            record(t, n.node_id, TraceKind::parent, n.preferred_parent, {}, n.rank);
            if (n.preferred_parent && !r.last_preferred) {
                while (!r.parked.empty()) {
                    enqueue(i, data_frame(n, r.parked.front()), t);
                    r.parked.pop_front();
                }
            }
            r.last_preferred = n.preferred_parent;
            topology_changed = true;
        }
        if (n.rank != r.last_rank && !(std::isinf(n.rank) && std::isinf(r.last_rank))) {
            record(t, n.node_id, TraceKind::rank, std::nullopt, {}, r.last_rank, n.rank);
            r.last_rank = n.rank;
            topology_changed = true;
        }
        std::vector<NodeId> table;
        for (const auto& p : n.parent_table) table.push_back(p.parent_id);
        if (table != r.last_table) {
            record(t, n.node_id, TraceKind::table, std::nullopt, {}, static_cast<double>(table.size()));
            r.last_table = std::move(table);
            topology_changed = true;
        }
        const bool running = n.timer(TimerKind::trickle) != kDisarmed;
        if (running && (!r.last_trickle_running || n.trickle.current_interval_ms != r.last_interval_ms))
            record(t, n.node_id, TraceKind::trickle, std::nullopt, {}, static_cast<double>(n.trickle.current_interval_ms));
        r.last_trickle_running = running;
        r.last_interval_ms = n.trickle.current_interval_ms;

        if (topology_changed) check_invariants();
        try_send(i, t);
    }

    void check_invariants() {
        ++safety_.checks;
        const std::size_t count = nodes_.size();
        std::vector<char> colour(count, 0);  // 0 new, 1 on the current walk, 2 finished
        for (std::size_t i = 0; i < count; ++i) {
            const NodeState& n = nodes_[i];
            safety_.max_parent_table = std::max(safety_.max_parent_table, n.parent_table.size());
            if (!n.alive || !n.preferred_parent) continue;
            const NodeState& p = nodes_[to_index(*n.preferred_parent)];
            const bool listed = std::any_of(n.parent_table.begin(), n.parent_table.end(),
                                            [&](const auto& r) { return r.parent_id == p.node_id; });
            if (!listed) ++safety_.preferred_outside_table;
            if (p.alive && !(n.rank > p.rank)) ++safety_.rank_violations;
        }
        for (std::size_t start = 0; start < count; ++start) {
            if (colour[start] != 0) continue;
            std::vector<std::size_t> walk;
            std::size_t cur = start;
            while (true) {
                if (colour[cur] == 1) {
                    ++safety_.acyclicity_violations;
                    break;
                }
                if (colour[cur] == 2) break;
                colour[cur] = 1;
                walk.push_back(cur);
                const NodeState& n = nodes_[cur];
                if (!n.alive || !n.preferred_parent) break;
                const std::size_t next = to_index(*n.preferred_parent);
                if (!nodes_[next].alive) break;
                cur = next;
            }
            for (std::size_t w : walk) colour[w] = 2;
        }
    }

    const Scenario& s_;
    ProtocolConfig config_;
    std::vector<NodeState> nodes_;
    double noise_db_;
    std::vector<Runtime> rt_;
    std::vector<double> xs_, ys_, zs_, vx_, vy_, vz_, d2_;
    std::vector<Frame> frames_;
    std::priority_queue<Event, std::vector<Event>, EventLater> events_;
    std::uint64_t seq_ = 0;
    std::uint64_t processed_ = 0;
    std::vector<TraceRecord> trace_;
    SafetyReport safety_;
};

}  // namespace

RunResult run_scenario(const Scenario& scenario) {
    scenario.validate();
    Simulation sim(scenario);
    return sim.run();
}

}  // namespace uwsim
