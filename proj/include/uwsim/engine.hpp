#pragma once

// Discrete-event simulation of one scenario. Events are ordered by
// (time, insertion sequence); every random draw comes from a per-node stream
// derived from the scenario seed, so a (scenario, seed) pair fixes the trace.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "uwsim/metrics.hpp"
#include "uwsim/protocol.hpp"
#include "uwsim/scenario.hpp"
#include "uwsim/trace.hpp"

namespace uwsim {

/// Node 0 is the sink at the configured position; the others are uniform in the
/// area. Exactly `scenario.mobile_count()` non-sink nodes are flagged mobile.
std::vector<NodeState> generate_topology(const Scenario& scenario);

struct MobilityState {
    Vec3 velocity;
    double next_turn_s = 0.0;
};

/// Random walk: on each direction epoch pick a uniform 3D heading and a speed
/// in the configured range, then advance linearly with reflection at the faces.
void mobility_step(NodeState& node, MobilityState& mobility, double now_s, double dt_s, Rng& rng,
                   const Scenario& scenario);

struct LinkBudget {
    bool in_range = false;
    double distance_m = 0.0;
    double level_db = 0.0;
    double snr_db = 0.0;
    double propagation_s = 0.0;
};

LinkBudget link_budget(const Scenario& scenario, double tx_power_w, const Vec3& from, bool from_sink, const Vec3& to,
                       bool to_sink);

/// Transmit power for a frame: long power for broadcasts and for unicasts
/// beyond the long-transmission threshold, short power otherwise.
double tx_power_for(const Scenario& scenario, std::optional<double> unicast_distance_m);

struct LinkOutcome {
    NodeId receiver{};
    bool delivered = false;
    double arrival_time_s = 0.0;
    double level_db = 0.0;
    double snr_db = 0.0;
};

/// Single-frame delivery to every in-range alive node (no interference).
std::vector<LinkOutcome> transmit(const NodeState& sender, std::span<const NodeState> nodes, int size_bytes,
                                  std::optional<NodeId> destination, double now_s, const Scenario& scenario);

struct SafetyReport {
    std::uint64_t checks = 0;
    std::uint64_t acyclicity_violations = 0;
    std::uint64_t rank_violations = 0;
    std::uint64_t preferred_outside_table = 0;
    std::size_t max_parent_table = 0;
    std::uint64_t clock_regressions = 0;
    std::uint64_t positions_outside_area = 0;
    std::uint64_t dead_node_activity = 0;
};

struct NodeEnergy {
    double initial_j = 0.0;
    double residual_j = 0.0;
};

struct RunResult {
    MetricsReport report;
    std::vector<TraceRecord> trace;
    SafetyReport safety;
    std::vector<NodeEnergy> energy;
    std::uint64_t events_processed = 0;
};

/// Validates the scenario (ConfigError) and runs it to `sim_duration_s`.
RunResult run_scenario(const Scenario& scenario);

}  // namespace uwsim
