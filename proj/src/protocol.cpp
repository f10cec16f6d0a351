#include "uwsim/protocol.hpp"

#include <algorithm>
#include <cmath>

namespace uwsim {

std::string_view mode_name(Mode mode) noexcept { return mode == Mode::rpluw ? "RPLUW" : "RPLUWM"; }

std::string_view timer_name(TimerKind kind) noexcept {
    switch (kind) {
        case TimerKind::trickle: return "trickle";
        case TimerKind::dio_send: return "dio_send";
        case TimerKind::linkage: return "linkage";
        case TimerKind::probe: return "probe";
        case TimerKind::mobility: return "mobility";
        case TimerKind::response: return "response";
        case TimerKind::dao_refresh: return "dao_refresh";
        case TimerKind::housekeeping: return "housekeeping";
        case TimerKind::detach_hold: return "detach_hold";
    }
    return "?";
}

double ProtocolConfig::i_max_s() const noexcept {
    return static_cast<double>(trickle_i_min_ms << trickle_doublings) / 1000.0;
}

void ProtocolConfig::validate() const {
    auto require = [](bool ok, const char* field, const char* message) {
        if (!ok) throw ConfigError(field, std::string(field) + ": " + message);
    };
    require(k_bar >= 1 && k_bar <= 16, "k_bar", "must be in [1, 16]");
    require(criterion_weights.empty() || criterion_weights.size() == madm::kCriterionCount, "criterion_weights",
            "must list one weight per criterion");
    for (double w : criterion_weights) require(w >= 0.0 && std::isfinite(w), "criterion_weights", "must be >= 0");
    require(rank_weights.hop > 0.0 && rank_weights.depth >= 0.0 && rank_weights.arssi >= 0.0, "rank_weights",
            "hop weight must be > 0 and the others >= 0");
    require(std::abs(rank_weights.hop + rank_weights.depth + rank_weights.arssi - 1.0) < 1e-9, "rank_weights",
            "must sum to 1");
    require(max_depth_m > 0.0, "max_depth_m", "must be > 0");
    require(arssi_beta > 0.0 && arssi_beta <= 1.0, "arssi_beta", "must be in (0, 1]");
    require(trickle_i_min_ms > 0, "trickle_i_min_ms", "must be > 0");
    require(trickle_doublings >= 0 && trickle_doublings <= 20, "trickle_doublings", "must be in [0, 20]");
    require(inconsistency_threshold >= 1, "inconsistency_threshold", "must be >= 1");
    require(rank_change_tolerance >= 0.0, "rank_change_tolerance", "must be >= 0");
    require(response_max_delay_s >= 0.0, "response_max_delay_s", "must be >= 0");
    require(mobility_period_s > 0.0, "mobility_period_s", "must be > 0");
    require(lease_s > 0.0 && lease_margin_s >= 0.0, "lease_s", "must be > 0 with a nonnegative margin");
    require(dao_refresh_s > 0.0 && dao_refresh_s < lease_s, "dao_refresh_s", "must be > 0 and below lease_s");
    require(dao_timeout_s > 0.0, "dao_timeout_s", "must be > 0");
    require(detach_hold_s >= 0.0, "detach_hold_s", "must be >= 0");
    require(probe_timeout_s > 0.0, "probe_timeout_s", "must be > 0");
    require(neighbor_timeout_factor > 0.0, "neighbor_timeout_factor", "must be > 0");
    require(hysteresis >= 0.0, "hysteresis", "must be >= 0");
}

double compute_rank(double parent_rank, int hop_increment, double own_depth_m, double parent_depth_m,
                    double arssi_norm, const RankWeights& weights, double max_depth_m) {
    if (!(max_depth_m > 0.0)) throw DomainError("max_depth_m must be > 0");
    if (parent_rank < 0.0) throw DomainError("parent rank must be >= 0");
    const double depth_term = std::max(0.0, own_depth_m - parent_depth_m) / max_depth_m;
    return parent_rank + weights.hop * hop_increment + weights.depth * depth_term +
           weights.arssi * (1.0 - std::clamp(arssi_norm, 0.0, 1.0));
}

double arssi_norm(double arssi_db, double band_noise_db, double snr_threshold_db) noexcept {
    return std::clamp((arssi_db - band_noise_db - snr_threshold_db) / 60.0, 0.0, 1.0);
}

void update_arssi(NodeState& state, NodeId neighbor, double rssi_sample, double beta) {
    if (!std::isfinite(rssi_sample)) throw DomainError("rssi sample must be finite");
    auto [it, inserted] = state.arssi_by_neighbor.try_emplace(neighbor, rssi_sample);
    if (!inserted) it->second = (1.0 - beta) * it->second + beta * rssi_sample;
}

std::vector<double> effective_criterion_weights(const ProtocolConfig& config) {
    if (!config.criterion_weights.empty()) return config.criterion_weights;
    return madm::ahp_weights(madm::default_comparison_matrix());
}

NodeState::NodeState() { timers.fill(kDisarmed); }

NodeState make_node(NodeId id, const Vec3& position, bool is_sink, bool is_mobile, double energy_j,
                    const ProtocolConfig& config) {
    NodeState s;
    s.node_id = id;
    s.position = position;
    s.depth_m = position.z;
    s.is_sink = is_sink;
    s.is_mobile = is_mobile && !is_sink;
    s.residual_energy_j = energy_j;
    s.rank = is_sink ? 0.0 : kInfiniteRank;
    s.trickle = TrickleState::make(config.trickle_i_min_ms, config.trickle_doublings, config.inconsistency_threshold);
    if (is_sink) s.dodag_root_list.push_back(position);
    return s;
}

namespace {

double uniform(Rng& rng, double lo, double hi) {
    if (!(hi > lo)) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double trickle_s(std::int64_t ms) { return static_cast<double>(ms) / 1000.0; }

ControlMessage make_message(NodeState& s, MessageKind kind, std::optional<NodeId> destination) {
    ControlMessage m;
    m.kind = kind;
    m.sender = s.node_id;
    m.destination = destination;
    m.sequence = s.next_sequence[static_cast<std::size_t>(kind)]++;
    m.size_bytes = default_size_bytes(kind);
    m.depth_m = s.depth_m;
    m.residual_energy_j = s.residual_energy_j;
    m.dodag_root = kSinkId;
    if (!s.dodag_root_list.empty()) m.root_position = s.dodag_root_list.front();
    return m;
}

const NeighborInfo* preferred_info(const NodeState& s) {
    if (!s.preferred_parent) return nullptr;
    auto it = s.neighbors.find(*s.preferred_parent);
    return it == s.neighbors.end() ? nullptr : &it->second;
}

double link_etx(const NeighborInfo& n) { return 1.0 / std::max(n.link_pdr, 0.01); }

/// Fills the path fields a node advertises about itself.
void stamp_path(const NodeState& s, ControlMessage& m) {
    m.rank = s.poisoning ? kInfiniteRank : s.rank;
    if (s.is_sink) {
        m.hop_count = 0;
        m.path_delay_ms = 0.0;
        m.path_etx = 0.0;
        return;
    }
    if (const NeighborInfo* p = preferred_info(s)) {
        m.hop_count = p->hop_count + 1;
        m.path_delay_ms = p->link_delay_ms + p->path_delay_ms;
        m.path_etx = link_etx(*p) + p->path_etx;
        auto a = s.arssi_by_neighbor.find(*s.preferred_parent);
        if (a != s.arssi_by_neighbor.end()) m.arssi = a->second;
    } else {
        m.hop_count = 0;
        m.path_delay_ms = 0.0;
        m.path_etx = 0.0;
    }
}

ControlMessage make_dio(NodeState& s) {
    ControlMessage m = make_message(s, MessageKind::dio, std::nullopt);
    stamp_path(s, m);
    return m;
}

ControlMessage make_dao(NodeState& s, NodeId parent, bool no_path) {
    ControlMessage m = make_message(s, MessageKind::dao, parent);
    m.no_path = no_path;
    m.rank = s.rank;
    auto a = s.arssi_by_neighbor.find(parent);
    if (a != s.arssi_by_neighbor.end()) m.arssi = a->second;
    return m;
}

void arm(NodeState& s, TimerKind kind, double deadline) { s.timer(kind) = deadline; }
void disarm(NodeState& s, TimerKind kind) { s.timer(kind) = kDisarmed; }
bool armed(const NodeState& s, TimerKind kind) { return s.timer(kind) != kDisarmed; }

void start_trickle(NodeState& s, double now, const ProtocolConfig& config, Rng& rng) {
    s.trickle = TrickleState::make(config.trickle_i_min_ms, config.trickle_doublings, config.inconsistency_threshold);
    arm(s, TimerKind::trickle, now + trickle_s(s.trickle.current_interval_ms));
    arm(s, TimerKind::dio_send, now + uniform(rng, 0.0, trickle_s(s.trickle.i_min_ms) / 2.0));
}

void stop_trickle(NodeState& s) {
    disarm(s, TimerKind::trickle);
    disarm(s, TimerKind::dio_send);
    disarm(s, TimerKind::response);
}

void trickle_feed(NodeState& s, TrickleEvent event, double now) {
    if (!armed(s, TimerKind::trickle)) return;
    const TrickleStep step = trickle_step(s.trickle, event);
    s.trickle = step.state;
    if (step.reset) arm(s, TimerKind::trickle, now + trickle_s(s.trickle.current_interval_ms));
}

bool accepts_children(const NodeState& s) { return s.is_sink || (s.preferred_parent.has_value() && !s.poisoning); }

void note_root(NodeState& s, const Vec3& root) {
    if (std::find(s.dodag_root_list.begin(), s.dodag_root_list.end(), root) == s.dodag_root_list.end())
        s.dodag_root_list.push_back(root);
}

/// Records an advertisement (DIO, RA or DAO-Ack) from a neighbor.
void absorb_advert(NodeState& s, const ControlMessage& m, double now) {
    NeighborInfo& n = s.neighbors[m.sender];
    const bool leased = s.confirmed.count(m.sender) > 0;
    if (leased && std::isfinite(m.rank)) {
        // Only adverts sent after the lease was granted may lower the bound.
        if (!n.advertised) n.rank = m.rank;
        else if (m.send_time_s >= n.view_since_s) n.rank = std::min(n.rank, m.rank);
    } else {
        n.rank = m.rank;
    }
    n.depth_m = m.depth_m;
    n.hop_count = m.hop_count;
    n.residual_energy_j = m.residual_energy_j;
    n.path_delay_ms = m.path_delay_ms;
    n.path_etx = m.path_etx;
    n.root = m.dodag_root;
    n.link_delay_ms = std::max(0.0, (now - m.send_time_s) * 1000.0);
    n.last_advert_s = now;
    n.advertised = true;
    if (std::isfinite(m.rank)) note_root(s, m.root_position);
}

void update_link_pdr(NeighborInfo& n, std::uint16_t sequence, double beta) {
    if (n.last_dio_sequence) {
        const int missed = std::min(serial_gap(sequence, *n.last_dio_sequence) - 1, 16);
        for (int i = 0; i < missed; ++i) n.link_pdr *= (1.0 - beta);
        n.link_pdr = (1.0 - beta) * n.link_pdr + beta;
    }
    n.last_dio_sequence = sequence;
}

class Reevaluator {
public:
    Reevaluator(NodeState& s, double now, const ProtocolConfig& c, Rng& rng, Outputs& out)
        : s_(s), now_(now), c_(c), rng_(rng), out_(out) {}

    /// `lost`, when given, is a parent declared unreachable; it is dropped and
    /// ignored as a candidate until it advertises again.
    void run(std::optional<NodeId> lost = std::nullopt) {
        if (s_.is_sink) return;
        const bool had_parent = s_.preferred_parent.has_value();
        const double old_rank = s_.rank;

        if (lost) {
            drop_parent(*lost);
            s_.neighbors[*lost].rank = kInfiniteRank;
        }
        expire();
        rebuild_table();
        choose_preferred();
        set_rank();
        transitions(had_parent, old_rank);
        schedule_housekeeping();
    }

    void drop_parent(NodeId p) {
        if (s_.confirmed.erase(p) > 0) out_.messages.push_back(make_dao(s_, p, true));
        s_.pending_dao.erase(p);
        if (s_.preferred_parent == p) s_.preferred_parent.reset();
        std::erase_if(s_.parent_table, [p](const madm::ParentRecord& r) { return r.parent_id == p; });
    }

private:
    void expire() {
        std::erase_if(s_.children, [&](const auto& kv) { return kv.second <= now_; });
        std::vector<NodeId> lapsed;
        for (const auto& [p, until] : s_.confirmed)
            if (until <= now_) lapsed.push_back(p);
        for (NodeId p : lapsed) {
            s_.confirmed.erase(p);
            if (s_.preferred_parent == p) s_.preferred_parent.reset();
        }
        std::vector<NodeId> unanswered;
        for (const auto& [p, until] : s_.pending_dao)
            if (until <= now_) unanswered.push_back(p);
        for (NodeId p : unanswered) {
            s_.pending_dao.erase(p);
            // Lost or refused; stop asking for a while.
            if (!s_.confirmed.count(p)) s_.neighbors[p].dao_backoff_until_s = now_ + c_.dao_refresh_s;
        }
    }

    void rebuild_table() {
        auto candidates = candidate_parents(s_, now_, c_);
        std::vector<NodeId> previous;
        for (const auto& r : s_.parent_table) previous.push_back(r.parent_id);

        std::vector<madm::ParentRecord> next;
        if (!candidates.empty()) {
            const auto weights = effective_criterion_weights(c_);
            auto scored = madm::select_parents(candidates, weights, madm::default_criteria(), candidates.size()).table;
            // Incumbents keep their seat unless a challenger beats them by the hysteresis margin.
            auto adjusted = [&](const madm::ParentRecord& r) {
                const bool incumbent = std::find(previous.begin(), previous.end(), r.parent_id) != previous.end();
                return incumbent ? r.madm_value * (1.0 + c_.hysteresis) : r.madm_value;
            };
            std::stable_sort(scored.begin(), scored.end(),
                             [&](const auto& a, const auto& b) { return adjusted(a) > adjusted(b); });
            if (scored.size() > c_.k_bar) scored.resize(c_.k_bar);
            std::sort(scored.begin(), scored.end(), madm::ranks_before);
            next = std::move(scored);
        }

        for (NodeId p : previous) {
            const bool kept = std::any_of(next.begin(), next.end(), [p](const auto& r) { return r.parent_id == p; });
            if (!kept) {
                if (s_.confirmed.erase(p) > 0) out_.messages.push_back(make_dao(s_, p, true));
                s_.pending_dao.erase(p);
                if (s_.preferred_parent == p) s_.preferred_parent.reset();
            }
        }
        // Leases held with parents that fell out of candidacy entirely are released too.
        std::vector<NodeId> orphaned;
        for (const auto& [p, until] : s_.confirmed)
            if (std::none_of(next.begin(), next.end(), [p = p](const auto& r) { return r.parent_id == p; }))
                orphaned.push_back(p);
        for (NodeId p : orphaned) {
            s_.confirmed.erase(p);
            out_.messages.push_back(make_dao(s_, p, true));
            if (s_.preferred_parent == p) s_.preferred_parent.reset();
        }

        s_.parent_table = std::move(next);
        for (const auto& r : s_.parent_table) {
            if (s_.confirmed.count(r.parent_id) || s_.pending_dao.count(r.parent_id)) continue;
            out_.messages.push_back(make_dao(s_, r.parent_id, false));
            s_.pending_dao[r.parent_id] = now_ + c_.dao_timeout_s;
        }
    }

    bool eligible(NodeId p) const {
        if (!s_.confirmed.count(p)) return false;
        auto it = s_.neighbors.find(p);
        if (it == s_.neighbors.end() || !std::isfinite(it->second.rank)) return false;
        return s_.children.empty() || it->second.rank < s_.rank;
    }

    void choose_preferred() {
        const madm::ParentRecord* best = nullptr;
        const madm::ParentRecord* incumbent = nullptr;
        for (const auto& r : s_.parent_table) {
            if (!eligible(r.parent_id)) continue;
            if (best == nullptr) best = &r;  // table is sorted best first
            if (s_.preferred_parent == r.parent_id) incumbent = &r;
        }
        if (best == nullptr) {
            s_.preferred_parent.reset();
            return;
        }
        if (incumbent != nullptr && best->madm_value <= incumbent->madm_value * (1.0 + c_.hysteresis)) {
            return;  // keep the incumbent
        }
        s_.preferred_parent = best->parent_id;
    }

    void set_rank() {
        if (const NeighborInfo* p = preferred_info(s_)) {
            const auto a = s_.arssi_by_neighbor.find(*s_.preferred_parent);
            const double level = a == s_.arssi_by_neighbor.end() ? 0.0 : a->second;
            const double target = compute_rank(p->rank, 1, s_.depth_m, p->depth_m,
                                               arssi_norm(level, c_.band_noise_db, c_.snr_threshold_db),
                                               c_.rank_weights, c_.max_depth_m);
            s_.rank = s_.children.empty() ? target : std::min(s_.rank, target);
        } else if (s_.children.empty()) {
            s_.rank = kInfiniteRank;
        }
    }

    void transitions(bool had_parent, double old_rank) {
        const bool has_parent = s_.preferred_parent.has_value();
        if (has_parent) {
            if (!had_parent) {
                s_.poisoning = false;
                disarm(s_, TimerKind::detach_hold);
                start_trickle(s_, now_, c_, rng_);
                arm(s_, TimerKind::linkage, now_ + c_.i_max_s());
            }
            if (!armed(s_, TimerKind::dao_refresh)) arm(s_, TimerKind::dao_refresh, now_ + c_.dao_refresh_s);
            if (had_parent && std::abs(s_.rank - old_rank) > c_.rank_change_tolerance)
                trickle_feed(s_, TrickleEvent::inconsistency, now_);
            return;
        }

        if (had_parent) {
            trickle_feed(s_, TrickleEvent::inconsistency, now_);
            stop_trickle(s_);
            disarm(s_, TimerKind::probe);
            s_.probe_target.reset();
            out_.messages.push_back(make_message(s_, MessageKind::dis, std::nullopt));
            if (s_.children.empty()) {
                ControlMessage poison = make_message(s_, MessageKind::dio, std::nullopt);
                poison.rank = kInfiniteRank;
                out_.messages.push_back(poison);
            } else {
                arm(s_, TimerKind::detach_hold, now_ + c_.detach_hold_s);
            }
            arm(s_, TimerKind::linkage, now_ + c_.i_max_s());
        }
        if (s_.confirmed.empty()) disarm(s_, TimerKind::dao_refresh);
        if (s_.children.empty()) {
            s_.poisoning = false;
            disarm(s_, TimerKind::detach_hold);
        }
    }

    void schedule_housekeeping() {
        double next = kDisarmed;
        for (const auto& kv : s_.children) next = std::min(next, kv.second);
        for (const auto& kv : s_.confirmed) next = std::min(next, kv.second);
        for (const auto& kv : s_.pending_dao) next = std::min(next, kv.second);
        s_.timer(TimerKind::housekeeping) = next;
    }

    NodeState& s_;
    double now_;
    const ProtocolConfig& c_;
    Rng& rng_;
    Outputs& out_;
};

void reevaluate(NodeState& s, double now, const ProtocolConfig& c, Rng& rng, Outputs& out) {
    Reevaluator(s, now, c, rng, out).run();
}

/// Probe a preferred parent that has not been heard for a mobility period (RPLUWM).
void probe_if_silent(NodeState& s, double now, const ProtocolConfig& c, Outputs& out) {
    if (c.mode != Mode::rpluwm || !s.preferred_parent || s.probe_target) return;
    const auto nb = s.neighbors.find(*s.preferred_parent);
    if (nb != s.neighbors.end() && now - nb->second.last_heard_s < c.mobility_period_s) return;
    s.probe_target = s.preferred_parent;
    out.messages.push_back(make_message(s, MessageKind::ns, *s.preferred_parent));
    arm(s, TimerKind::probe, now + c.probe_timeout_s);
}

bool stale(NodeState& s, const ControlMessage& m) {
    auto& slot = s.last_sequence[m.sender][static_cast<std::size_t>(m.kind)];
    if (slot && !serial_newer(m.sequence, *slot)) return true;
    slot = m.sequence;
    return false;
}

void handle_dio(NodeState& s, const ControlMessage& m, double now, const ProtocolConfig& c, Rng& rng,
                Outputs& out) {
    NeighborInfo& n = s.neighbors[m.sender];
    const double previous_rank = n.rank;
    const NodeId previous_root = n.root;
    const bool known = n.advertised;
    update_link_pdr(n, m.sequence, c.arssi_beta);
    absorb_advert(s, m, now);

    if (s.is_sink) return;

    const bool member = std::any_of(s.parent_table.begin(), s.parent_table.end(),
                                    [&](const auto& r) { return r.parent_id == m.sender; });
    if (member && known) {
        const bool rank_moved = !(std::isfinite(previous_rank) && std::isfinite(m.rank))
                                    ? std::isfinite(previous_rank) != std::isfinite(m.rank)
                                    : std::abs(m.rank - previous_rank) > c.rank_change_tolerance;
        const bool conflict = rank_moved || previous_root != m.dodag_root;
        trickle_feed(s, conflict ? TrickleEvent::inconsistency : TrickleEvent::consistency, now);
    }

    Reevaluator r(s, now, c, rng, out);
    if (!std::isfinite(m.rank) && (s.confirmed.count(m.sender) || s.pending_dao.count(m.sender)))
        r.run(m.sender);
    else
        r.run();
}

void handle_dao(NodeState& s, const ControlMessage& m, double now, const ProtocolConfig& c, Rng& rng,
                Outputs& out) {
    if (m.no_path) {
        s.children.erase(m.sender);
        reevaluate(s, now, c, rng, out);
        return;
    }
    if (!accepts_children(s)) return;
    if (s.confirmed.count(m.sender) || s.pending_dao.count(m.sender)) return;
    const auto a = s.arssi_by_neighbor.find(m.sender);
    if (a == s.arssi_by_neighbor.end() || a->second - c.band_noise_db < c.snr_threshold_db) return;

    s.children[m.sender] = now + c.lease_s + c.lease_margin_s;
    ControlMessage ack = make_message(s, MessageKind::dao_ack, m.sender);
    stamp_path(s, ack);
    ack.lease_expiry_s = now + c.lease_s;
    out.messages.push_back(ack);
    reevaluate(s, now, c, rng, out);
    if (s.is_sink) {
        double next = kDisarmed;
        for (const auto& kv : s.children) next = std::min(next, kv.second);
        s.timer(TimerKind::housekeeping) = next;
    }
}

void handle_dao_ack(NodeState& s, const ControlMessage& m, double now, const ProtocolConfig& c, Rng& rng,
                    Outputs& out) {
    const bool member = std::any_of(s.parent_table.begin(), s.parent_table.end(),
                                    [&](const auto& r) { return r.parent_id == m.sender; });
    if (!member || m.lease_expiry_s <= now || !std::isfinite(m.rank)) {
        // Not wanted any more: hand the lease straight back.
        out.messages.push_back(make_dao(s, m.sender, true));
        return;
    }
    s.pending_dao.erase(m.sender);
    const bool renewing = s.confirmed.count(m.sender) > 0;
    NeighborInfo& n = s.neighbors[m.sender];
    if (!renewing) {
        n.advertised = false;  // the ack's rank replaces any earlier advertisement as the lease bound
        n.view_since_s = m.send_time_s;
    }
    s.confirmed[m.sender] = m.lease_expiry_s;
    absorb_advert(s, m, now);
    reevaluate(s, now, c, rng, out);
}

void handle_dis(NodeState& s, const ControlMessage& /*m*/, double now, const ProtocolConfig& c, Rng& rng) {
    if (!s.attached() || s.poisoning) return;
    trickle_feed(s, TrickleEvent::inconsistency, now);
    if (!armed(s, TimerKind::response)) arm(s, TimerKind::response, now + uniform(rng, 0.0, c.response_max_delay_s));
}

}  // namespace

std::vector<madm::ParentRecord> candidate_parents(const NodeState& s, double now_s, const ProtocolConfig& c) {
    std::vector<madm::ParentRecord> out;
    if (s.is_sink) return out;
    const double horizon = c.neighbor_timeout_factor * c.i_max_s();
    for (const auto& [id, n] : s.neighbors) {
        if (id == s.node_id || !n.advertised || !std::isfinite(n.rank)) continue;
        if (now_s - n.last_advert_s > horizon) continue;
        if (n.dao_backoff_until_s > now_s && !s.confirmed.count(id)) continue;
        if (s.children.count(id)) continue;
        if (!s.children.empty() && !(n.rank < s.rank)) continue;
        madm::ParentRecord r;
        r.parent_id = id;
        r.hop_count = n.hop_count;
        r.residual_energy_j = n.residual_energy_j;
        const auto a = s.arssi_by_neighbor.find(id);
        r.arssi = a == s.arssi_by_neighbor.end() ? 0.0 : a->second;
        r.delay_ms = n.link_delay_ms + n.path_delay_ms;
        r.etx = link_etx(n) + n.path_etx;
        r.link_pdr = n.link_pdr;
        r.depth_m = n.depth_m;
        out.push_back(r);
    }
    return out;
}

Outputs start_node(NodeState& s, double now_s, const ProtocolConfig& c, Rng& rng) {
    Outputs out;
    if (s.is_sink) {
        s.rank = 0.0;
        start_trickle(s, now_s, c, rng);
        arm(s, TimerKind::dio_send, now_s);
        return out;
    }
    // First solicitation is spread over one minimum interval to avoid a start-up burst.
    arm(s, TimerKind::linkage, now_s + uniform(rng, 0.0, trickle_s(c.trickle_i_min_ms)));
    // Either end of a link may move, so every node watches its parent link under RPLUWM.
    if (c.mode == Mode::rpluwm) arm(s, TimerKind::mobility, now_s + c.mobility_period_s);
    return out;
}

void on_frame_heard(NodeState& s, NodeId sender, double level_db, double now_s, const ProtocolConfig& c) {
    update_arssi(s, sender, level_db, c.arssi_beta);
    NeighborInfo& n = s.neighbors[sender];
    n.last_heard_s = now_s;
    n.reachable = true;
    if (s.preferred_parent == sender) {
        arm(s, TimerKind::linkage, now_s + c.i_max_s());
        if (s.probe_target == sender) {
            s.probe_target.reset();
            disarm(s, TimerKind::probe);
        }
    }
}

Outputs process_control_message(NodeState& s, const ControlMessage& m, double now_s, const ProtocolConfig& c,
                                Rng& rng) {
    Outputs out;
    if (!s.alive || m.sender == s.node_id) return out;
    if (m.destination && *m.destination != s.node_id) return out;
    if (is_neighbor_discovery(m.kind)) return neighbor_discovery_step(s, m, now_s, c, rng);
    if (stale(s, m)) return out;
    switch (m.kind) {
        case MessageKind::dio: handle_dio(s, m, now_s, c, rng, out); break;
        case MessageKind::dao: handle_dao(s, m, now_s, c, rng, out); break;
        case MessageKind::dao_ack: handle_dao_ack(s, m, now_s, c, rng, out); break;
        case MessageKind::dis: handle_dis(s, m, now_s, c, rng); break;
        default: break;
    }
    return out;
}

Outputs neighbor_discovery_step(NodeState& s, const ControlMessage& m, double now_s, const ProtocolConfig& c,
                                Rng& rng) {
    Outputs out;
    if (c.mode != Mode::rpluwm || !s.alive) return out;
    if (stale(s, m)) return out;
    switch (m.kind) {
        case MessageKind::ns:
            out.messages.push_back(make_message(s, MessageKind::na, m.sender));
            break;
        case MessageKind::na: {
            NeighborInfo& n = s.neighbors[m.sender];
            n.reachable = true;
            n.last_heard_s = now_s;
            if (s.probe_target == m.sender) {
                s.probe_target.reset();
                disarm(s, TimerKind::probe);
                arm(s, TimerKind::linkage, now_s + c.i_max_s());
            }
            break;
        }
        case MessageKind::rs:
            if (s.attached() && !s.poisoning) {
                ControlMessage ra = make_message(s, MessageKind::ra, m.sender);
                stamp_path(s, ra);
                out.messages.push_back(ra);
            }
            break;
        case MessageKind::ra: {
            absorb_advert(s, m, now_s);
            if (!s.is_sink) reevaluate(s, now_s, c, rng, out);
            break;
        }
        default: break;
    }
    return out;
}

Outputs timer_expiry(NodeState& s, TimerKind timer, double now_s, const ProtocolConfig& c, Rng& rng) {
    Outputs out;
    if (!s.alive || s.timer(timer) == kDisarmed) return out;
    disarm(s, timer);
    switch (timer) {
        case TimerKind::trickle: {
            const TrickleStep step = trickle_step(s.trickle, TrickleEvent::interval_expired);
            s.trickle = step.state;
            arm(s, TimerKind::trickle, now_s + trickle_s(s.trickle.current_interval_ms));
            if (step.emit_dio)
                arm(s, TimerKind::dio_send, now_s + uniform(rng, 0.0, trickle_s(s.trickle.i_min_ms) / 2.0));
            break;
        }
        case TimerKind::dio_send:
        case TimerKind::response:
            if (s.attached()) out.messages.push_back(make_dio(s));
            break;
        case TimerKind::linkage:
            arm(s, TimerKind::linkage, now_s + c.i_max_s());
            if (!s.preferred_parent) {
                if (!s.is_sink) out.messages.push_back(make_message(s, MessageKind::dis, std::nullopt));
                break;
            }
            if (c.mode == Mode::rpluwm) {
                s.probe_target = s.preferred_parent;
                out.messages.push_back(make_message(s, MessageKind::ns, *s.preferred_parent));
                out.messages.push_back(make_message(s, MessageKind::dis, std::nullopt));
                arm(s, TimerKind::probe, now_s + c.probe_timeout_s);
            } else {
                Reevaluator r(s, now_s, c, rng, out);
                r.run(*s.preferred_parent);
                if (s.preferred_parent)  // failed over to a backup; still ask around
                    out.messages.push_back(make_message(s, MessageKind::dis, std::nullopt));
            }
            break;
        case TimerKind::probe:
            if (s.probe_target && s.probe_target == s.preferred_parent) {
                const NodeId lost = *s.probe_target;
                s.probe_target.reset();
                Reevaluator(s, now_s, c, rng, out).run(lost);
            }
            s.probe_target.reset();
            probe_if_silent(s, now_s, c, out);
            break;
        case TimerKind::mobility: {
            arm(s, TimerKind::mobility, now_s + c.mobility_period_s);
            if (c.mode != Mode::rpluwm) break;
            if (!s.preferred_parent) {
                if (s.is_mobile) out.messages.push_back(make_message(s, MessageKind::rs, std::nullopt));
                break;
            }
            const auto a = s.arssi_by_neighbor.find(*s.preferred_parent);
            const double snr = a == s.arssi_by_neighbor.end() ? -kInfiniteRank : a->second - c.band_noise_db;
            if (snr < c.mobility_snr_threshold_db) out.messages.push_back(make_message(s, MessageKind::dis, std::nullopt));
            // A parent that has gone silent leaves the smoothed ARSSI frozen; ask it directly.
            probe_if_silent(s, now_s, c, out);
            break;
        }
        case TimerKind::dao_refresh:
            if (!s.confirmed.empty()) {
                arm(s, TimerKind::dao_refresh, now_s + c.dao_refresh_s);
                for (const auto& [p, until] : s.confirmed) {
                    if (s.pending_dao.count(p)) continue;
                    out.messages.push_back(make_dao(s, p, false));
                    s.pending_dao[p] = now_s + c.dao_timeout_s;
                }
                reevaluate(s, now_s, c, rng, out);
            }
            break;
        case TimerKind::housekeeping:
            if (s.is_sink) {
                std::erase_if(s.children, [&](const auto& kv) { return kv.second <= now_s; });
                double next = kDisarmed;
                for (const auto& kv : s.children) next = std::min(next, kv.second);
                s.timer(TimerKind::housekeeping) = next;
            } else {
                reevaluate(s, now_s, c, rng, out);
            }
            break;
        case TimerKind::detach_hold:
            if (!s.preferred_parent && !s.children.empty() && !s.is_sink) {
                s.poisoning = true;
                ControlMessage poison = make_message(s, MessageKind::dio, std::nullopt);
                poison.rank = kInfiniteRank;
                out.messages.push_back(poison);
            }
            break;
    }
    return out;
}

}  // namespace uwsim
