#include "uwsim/scenario.hpp"

#include <cmath>
#include <string>

#include "uwsim/madm.hpp"

namespace uwsim {

namespace {

void require(bool ok, const char* field, const std::string& message) {
    if (!ok) throw ConfigError(field, std::string(field) + ": " + message);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void Scenario::validate() const {
    require(node_count >= 1 && node_count <= 100000, "node_count", "must be in [1, 100000]");
    require(area.hi.x > area.lo.x && area.hi.y > area.lo.y && area.hi.z > area.lo.z && area.lo.z >= 0.0, "area",
            "must have positive extent on every axis and start at depth >= 0");
    require(area.contains(sink_position), "sink_position", "must lie inside the area");
    require(mobile_fraction >= 0.0 && mobile_fraction <= 1.0, "mobile_fraction", "must be in [0, 1]");
    require(speed_min_mps >= 0.0 && speed_max_mps >= speed_min_mps, "speed_range_mps",
            "must satisfy 0 <= min <= max");
    require(direction_epoch_s > 0.0, "direction_epoch_s", "must be > 0");
    require(mobility_tick_s > 0.0, "mobility_tick_s", "must be > 0");
    require(initial_node_energy_j > 0.0, "initial_node_energy_j", "must be > 0");
    require(initial_sink_energy_j > 0.0, "initial_sink_energy_j", "must be > 0");
    require(tx_long_w > 0.0 && std::isfinite(tx_long_w), "tx_long_w", "must be > 0");
    require(tx_short_w > 0.0 && std::isfinite(tx_short_w), "tx_short_w", "must be > 0");
    require(finite_nonneg(rx_w), "rx_w", "must be >= 0");
    require(finite_nonneg(idle_w), "idle_w", "must be >= 0");
    require(finite_nonneg(aggregation_w), "aggregation_w", "must be >= 0");
    require(finite_nonneg(long_tx_threshold_m), "long_tx_threshold_m", "must be >= 0");
    require(node_range_m > 0.0, "node_range_m", "must be > 0");
    require(sink_range_m > 0.0, "sink_range_m", "must be > 0");
    require(frequency_khz > 0.0, "frequency_khz", "must be > 0");
    require(bandwidth_bps > 0.0, "bandwidth_bps", "must be > 0");
    for (double ch : channels_khz) require(ch > 0.0, "channels_khz", "must all be > 0");
    require(packet_rate_pps > 0.0 && std::isfinite(packet_rate_pps), "packet_rate_pps", "must be > 0");
    require(data_packet_bytes > 0, "data_packet_bytes", "must be > 0");
    require(queue_capacity >= 1, "queue_capacity", "must be >= 1");
    require(max_hops >= 1, "max_hops", "must be >= 1");
    require(sim_duration_s > 0.0 && std::isfinite(sim_duration_s), "sim_duration_s", "must be > 0");
    require(snr_threshold_db == snr_threshold_db, "snr_threshold_db", "must be a number");
    require(predetermined_lifetime_s >= sim_duration_s, "predetermined_lifetime_s",
            "must be >= sim_duration_s so every death time is credited");
    require(convergence_window_s > 0.0, "convergence_window_s", "must be > 0");
    require(shallow_depth_threshold_m >= 0.0, "shallow_depth_threshold_m", "must be >= 0");
    require(propagation.shallow_coefficient > 0.0, "shallow_coefficient", "must be > 0");
    require(propagation.spreading_factor > 0.0, "spreading_factor", "must be > 0");
    require(propagation.absorption_depth_m >= 0.0, "absorption_depth_m", "must be >= 0");
    require(comparison_matrix.empty() || comparison_matrix.size() == madm::kCriterionCount * madm::kCriterionCount,
            "comparison_matrix", "must hold 49 entries in row-major order");
    if (!comparison_matrix.empty()) {
        try {
            madm::ComparisonMatrix(madm::kCriterionCount, comparison_matrix).validate();
        } catch (const DomainError& e) {
            throw ConfigError("comparison_matrix", std::string("comparison_matrix: ") + e.what());
        }
    }
    try {
        environment.validate();
    } catch (const DomainError& e) {
        throw ConfigError("environment", e.what());
    }
    protocol_config(*this).validate();
}

int Scenario::mobile_count() const noexcept {
    if (mode == Mode::rpluw || node_count <= 1) return 0;
    const int wanted = static_cast<int>(std::floor(mobile_fraction * node_count));
    return std::min(wanted, node_count - 1);
}

ResolvedWeights resolve_weights(const Scenario& scenario) {
    if (!scenario.criterion_weights.empty()) return {scenario.criterion_weights, 0.0};
    const madm::ComparisonMatrix matrix =
        scenario.comparison_matrix.empty()
            ? madm::default_comparison_matrix()
            : madm::ComparisonMatrix(madm::kCriterionCount, scenario.comparison_matrix);
    auto weights = madm::ahp_weights(matrix);
    const double cr = madm::consistency_ratio(matrix, weights);
    return {std::move(weights), cr};
}

channel::Geometry geometry_for(const Scenario& scenario, double mean_depth_m) noexcept {
    switch (scenario.tl_model) {
        case TlModel::shallow: return channel::Geometry::shallow_cylindrical;
        case TlModel::deep: return channel::Geometry::deep_spherical;
        case TlModel::practical: return channel::Geometry::practical;
        case TlModel::automatic: break;
    }
    return mean_depth_m < scenario.shallow_depth_threshold_m ? channel::Geometry::shallow_cylindrical
                                                             : channel::Geometry::deep_spherical;
}

double received_level_db(const Scenario& scenario, double tx_power_w, double distance_m, double mean_depth_m) {
    const double r = std::max(distance_m, 1.0);
    return channel::source_level_db(tx_power_w) -
           channel::transmission_loss(geometry_for(scenario, mean_depth_m), r, scenario.frequency_khz,
                                      scenario.environment, scenario.propagation);
}

double scenario_band_noise_db(const Scenario& scenario) {
    return channel::band_noise_db(scenario.environment, scenario.frequency_khz, scenario.bandwidth_bps);
}

ProtocolConfig protocol_config(const Scenario& scenario) {
    ProtocolConfig c;
    c.mode = scenario.mode;
    c.k_bar = scenario.k_bar;
    c.criterion_weights = resolve_weights(scenario).weights;
    c.rank_weights = scenario.rank_weights;
    c.max_depth_m = scenario.area.hi.z;
    c.snr_threshold_db = scenario.snr_threshold_db;
    c.band_noise_db = scenario_band_noise_db(scenario);
    const double mid_depth = 0.5 * (scenario.area.lo.z + scenario.area.hi.z);
    c.mobility_snr_threshold_db =
        received_level_db(scenario, scenario.tx_long_w, 0.9 * scenario.node_range_m, mid_depth) - c.band_noise_db;
    c.trickle_i_min_ms = scenario.trickle_i_min_ms;
    c.trickle_doublings = scenario.trickle_doublings;
    c.inconsistency_threshold = scenario.inconsistency_threshold;
    c.mobility_period_s = 1.0 / scenario.packet_rate_pps;
    c.hysteresis = scenario.hysteresis;
    c.lease_s = scenario.lease_s;
    c.dao_refresh_s = scenario.dao_refresh_s;
    return c;
}

}  // namespace uwsim
