#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "uwsim/channel.hpp"
#include "uwsim/protocol.hpp"
#include "uwsim/types.hpp"

namespace uwsim {

enum class TlModel {
    automatic,  // shallow-cylindrical above the depth threshold, deep-spherical below
    shallow,
    deep,
    practical,
};

/// One simulation run. Defaults reproduce the reference network conditions.
struct Scenario {
    int node_count = 50;  // including the sink
    Box area{{0.0, 0.0, 0.0}, {1000.0, 1000.0, 500.0}};
    Vec3 sink_position{500.0, 500.0, 0.0};
    double mobile_fraction = 0.4;
    double speed_min_mps = 1.0;
    double speed_max_mps = 5.0;
    double direction_epoch_s = 30.0;
    double mobility_tick_s = 1.0;

    double initial_node_energy_j = 50.0;
    double initial_sink_energy_j = 50000.0;
    double tx_long_w = 1.3;
    double tx_short_w = 0.8;
    double rx_w = 0.7;
    double idle_w = 0.008;
    double aggregation_w = 0.22;
    double long_tx_threshold_m = 75.0;

    double node_range_m = 150.0;
    double sink_range_m = 200.0;
    double frequency_khz = 30.5;
    double bandwidth_bps = 30000.0;
    std::vector<double> channels_khz{30.511, 30.518, 30.525, 30.532, 30.539, 30.546,
                                     30.553, 30.560, 30.567, 30.574, 30.581};

    double packet_rate_pps = 0.1;
    int data_packet_bytes = 32;
    int queue_capacity = 64;
    int max_hops = 32;

    double sim_duration_s = 600.0;
    std::uint64_t seed = 1;
    Mode mode = Mode::rpluwm;

    channel::Environment environment;
    channel::SoundSpeedMode sound_speed_mode = channel::SoundSpeedMode::mackenzie_corrected;
    channel::PropagationConfig propagation;
    TlModel tl_model = TlModel::automatic;
    double shallow_depth_threshold_m = 100.0;

    double snr_threshold_db = 10.0;
    double predetermined_lifetime_s = 900.0;
    double convergence_window_s = 30.0;

    // Protocol knobs.
    std::size_t k_bar = 4;
    RankWeights rank_weights;
    std::vector<double> criterion_weights;    // empty: AHP on the comparison matrix
    std::vector<double> comparison_matrix;    // empty: default 7x7 priority matrix
    std::int64_t trickle_i_min_ms = 4096;
    int trickle_doublings = 4;
    int inconsistency_threshold = 1;
    double hysteresis = 0.05;
    double lease_s = 90.0;
    double dao_refresh_s = 30.0;

    /// Throws ConfigError naming the first offending field.
    void validate() const;

    /// Number of nodes flagged mobile (0 in RPLUW mode; never the sink).
    int mobile_count() const noexcept;

    double range_between(bool a_is_sink, bool b_is_sink) const noexcept {
        return (a_is_sink || b_is_sink) ? sink_range_m : node_range_m;
    }
};

/// Criterion weights the scenario resolves to, plus the consistency ratio of the
/// matrix they came from (0 when weights were given directly).
struct ResolvedWeights {
    std::vector<double> weights;
    double consistency_ratio = 0.0;
};
ResolvedWeights resolve_weights(const Scenario& scenario);

channel::Geometry geometry_for(const Scenario& scenario, double mean_depth_m) noexcept;

/// Level at the receiver, dB re 1 uPa. Distances below 1 m are treated as 1 m.
double received_level_db(const Scenario& scenario, double tx_power_w, double distance_m, double mean_depth_m);

/// Noise power over the scenario bandwidth at the carrier, dB.
double scenario_band_noise_db(const Scenario& scenario);

/// Protocol configuration derived from the scenario, including the
/// link-budget thresholds that depend on the channel.
ProtocolConfig protocol_config(const Scenario& scenario);

}  // namespace uwsim
