#include "uwsim/channel.hpp"

#include <cmath>
#include <numbers>

namespace uwsim::channel {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double x) { return 10.0 * std::log10(x); }

void require_positive_frequency(double frequency_khz) {
    if (!(frequency_khz > 0.0)) throw DomainError("frequency_khz must be > 0");
}

}  // namespace

void Environment::validate() const {
    if (!(shipping_factor >= 0.0 && shipping_factor <= 1.0))
        throw DomainError("shipping_factor must lie in [0, 1]");
    if (!(wind_speed_mps >= 0.0 && wind_speed_mps <= 10.0))
        throw DomainError("wind_speed_mps must lie in [0, 10]");
    if (!(water_density_kg_m3 > 0.0)) throw DomainError("water_density_kg_m3 must be > 0");
    if (!(gravity_mps2 > 0.0)) throw DomainError("gravity_mps2 must be > 0");
    if (!(salinity_ppt >= 0.0)) throw DomainError("salinity_ppt must be >= 0");
}

double sound_speed(const Environment& env, double depth_m, SoundSpeedMode mode) {
    if (!(depth_m >= 0.0)) throw DomainError("depth_m must be >= 0");
    const double t = env.temperature_celsius;
    const double s = env.salinity_ppt - 35.0;
    const double d = depth_m;
    const double cubic = mode == SoundSpeedMode::literal ? 7.139e-3 : 7.139e-13;
    return 1449.0 + 4.591 * t - 5.304e-2 * t * t + 2.374e-4 * t * t * t + 1.34 * s + 1.63e-2 * d +
           1.675e-7 * d * d + 1.025e-2 * t * s - cubic * t * d * d * d;
}

NoiseBreakdown ambient_noise(const Environment& env, double frequency_khz) {
    require_positive_frequency(frequency_khz);
    const double lf = std::log10(frequency_khz);
    NoiseBreakdown n;
    n.turbulence_db = 17.0 - 30.0 * lf;
    n.shipping_db = 40.0 + 20.0 * (env.shipping_factor - 0.5) + 26.0 * lf - 60.0 * std::log10(frequency_khz + 0.03);
    n.wind_db = 50.0 + 7.5 * std::sqrt(env.wind_speed_mps) + 20.0 * lf - 40.0 * std::log10(frequency_khz + 0.4);
    n.thermal_db = -15.0 + 20.0 * lf;
    // The four sources are uncorrelated, so they add as powers.
    n.total_db = linear_to_db(db_to_linear(n.turbulence_db) + db_to_linear(n.shipping_db) +
                              db_to_linear(n.wind_db) + db_to_linear(n.thermal_db));
    return n;
}

double band_noise_db(const Environment& env, double frequency_khz, double bandwidth_hz) {
    if (!(bandwidth_hz > 0.0)) throw DomainError("bandwidth must be > 0");
    return ambient_noise(env, frequency_khz).total_db + 10.0 * std::log10(bandwidth_hz);
}

double source_level_db(double watts) {
    if (!(watts > 0.0)) throw DomainError("transmit power must be > 0");
    return 170.8 + 10.0 * std::log10(watts);
}

double boric_acid_relaxation_khz(const Environment& env) {
    return 0.78 * std::sqrt(env.salinity_ppt / 35.0) * std::exp(env.temperature_celsius / 26.0);
}

double magnesium_sulfate_relaxation_khz(const Environment& env) {
    return 42.0 * std::exp(env.temperature_celsius / 17.0);
}

double absorption_db_per_km(const Environment& env, double frequency_khz, double depth_km,
                            AbsorptionVariant variant) {
    require_positive_frequency(frequency_khz);
    if (!(depth_km >= 0.0)) throw DomainError("depth_km must be >= 0");
    const double t = env.temperature_celsius;
    const double f2sq = frequency_khz * frequency_khz;
    const double f1 = boric_acid_relaxation_khz(env);
    const double f2 = magnesium_sulfate_relaxation_khz(env);

    const bool printed = variant == AbsorptionVariant::as_printed;
    const double ph_divisor = printed ? std::exp(0.56) : 0.56;
    const double salinity_divisor = printed ? 25.0 : 35.0;

    const double boric = 0.106 * (f1 * f2sq) / (f1 * f1 + f2sq) * std::exp((env.ph - 8.0) / ph_divisor);
    const double magnesium = 0.52 * (1.0 + t / 43.0) * (env.salinity_ppt / salinity_divisor) * (f2 * f2sq) /
                             (f2 * f2 + f2sq) * std::exp(-depth_km / 6.0);
    const double pure_water = 4.9e-4 * f2sq * std::exp(-(t / 27.0 + depth_km / 17.0));
    return boric + magnesium + pure_water;
}

DepthAttenuation attenuation_at_depth(double alpha_surface, double depth_m) {
    if (!(depth_m >= 0.0)) throw DomainError("depth_m must be >= 0");
    const double alpha = alpha_surface * (1.0 - 1.93e-5 * depth_m);
    if (alpha < 0.0) return {0.0, true};
    return {alpha, false};
}

double cylindrical_spreading_loss_db(double r1_m, double r2_m, double coefficient) {
    if (!(r1_m > 0.0) || !(r2_m > 0.0)) throw DomainError("radii must be > 0");
    return coefficient * std::log10(r1_m / r2_m);
}

double deep_spherical_loss_db(double r_m, double alpha_db_per_km, double anomaly_db) {
    if (!(r_m > 0.0)) throw DomainError("range must be > 0");
    return 20.0 * std::log10(r_m) + alpha_db_per_km * r_m * 1e-3 + anomaly_db;
}

double transmission_loss(Geometry geometry, double r_m, double frequency_khz, const Environment& env,
                         const PropagationConfig& config) {
    if (!(r_m > 0.0)) throw DomainError("range must be > 0");
    switch (geometry) {
        case Geometry::shallow_cylindrical:
            return cylindrical_spreading_loss_db(r_m, 1.0, config.shallow_coefficient);
        case Geometry::deep_spherical: {
            const double alpha =
                absorption_db_per_km(env, frequency_khz, config.absorption_depth_m / 1000.0, config.absorption);
            return deep_spherical_loss_db(r_m, alpha, config.anomaly_db);
        }
        case Geometry::practical: {
            const double alpha =
                absorption_db_per_km(env, frequency_khz, config.absorption_depth_m / 1000.0, config.absorption);
            return 10.0 * config.spreading_factor * std::log10(r_m) + alpha * r_m * 1e-3;
        }
    }
    throw DomainError("unknown geometry");
}

double capacity_bps(double snr_linear, double bandwidth_hz) {
    if (!(bandwidth_hz > 0.0)) throw DomainError("bandwidth must be > 0");
    if (snr_linear < 0.0) throw DomainError("snr must be >= 0");
    return bandwidth_hz * std::log2(1.0 + snr_linear);
}

SnrCapacity snr_and_capacity(double tx_power_w, const ChannelSample& sample, const Environment& env,
                             Geometry geometry, const PropagationConfig& config) {
    if (!(sample.bandwidth_hz > 0.0)) throw DomainError("bandwidth must be > 0");
    const double received_db =
        source_level_db(tx_power_w) - transmission_loss(geometry, sample.distance_m, sample.frequency_khz, env, config);
    const double noise_db = band_noise_db(env, sample.frequency_khz, sample.bandwidth_hz);
    const double snr = db_to_linear(received_db - noise_db);
    return {snr, capacity_bps(snr, sample.bandwidth_hz)};
}

DelayBreakdown delay(std::span<const double> hop_distances_m, double sound_speed_mps, double packet_bits,
                     double bitrate_bps, double processing_s, double queuing_s) {
    if (hop_distances_m.empty()) throw DomainError("hop list must not be empty");
    if (!(sound_speed_mps > 0.0)) throw DomainError("sound speed must be > 0");
    if (!(bitrate_bps > 0.0)) throw DomainError("bitrate must be > 0");
    if (packet_bits < 0.0 || processing_s < 0.0 || queuing_s < 0.0) throw DomainError("delays must be >= 0");

    const auto hops = static_cast<double>(hop_distances_m.size());
    DelayBreakdown d;
    for (double hop : hop_distances_m) {
        if (hop < 0.0) throw DomainError("hop distance must be >= 0");
        d.propagation_s += hop / sound_speed_mps;
    }
    d.transmission_s = hops * (packet_bits / bitrate_bps);
    d.processing_s = hops * processing_s;
    d.queuing_s = hops * queuing_s;
    d.total_s = d.processing_s + d.queuing_s + d.propagation_s + d.transmission_s;
    return d;
}

double depth_difference(double pressure_a_pa, double pressure_b_pa, const Environment& env) {
    const double rho_g = env.water_density_kg_m3 * env.gravity_mps2;
    if (!(rho_g > 0.0)) throw DomainError("density * gravity must be > 0");
    return (pressure_a_pa - pressure_b_pa) / rho_g;
}

double cylindrical_power(double radius_m, double height_m) {
    return 2.0 * std::numbers::pi * radius_m * height_m;
}

double spherical_power(double radius_m, double intensity) {
    return 4.0 * std::numbers::pi * radius_m * radius_m * intensity;
}

double linear_chain_energy(Geometry geometry, RelayMode mode, int n_hops, double hop_distance_m,
                           double per_hop_tx_energy, int packets) {
    if (n_hops < 1) throw DomainError("n_hops must be >= 1");
    if (packets < 0) throw DomainError("packets must be >= 0");
    if (!(hop_distance_m > 0.0)) throw DomainError("hop distance must be > 0");
    if (geometry == Geometry::practical) throw DomainError("chain energy is defined for shallow or deep geometry only");

    const double unit = per_hop_tx_energy * static_cast<double>(packets);
    const auto n = static_cast<double>(n_hops);
    const bool shallow = geometry == Geometry::shallow_cylindrical;

    if (mode == RelayMode::multi_hop) {
        // Node i relays the traffic of every node behind it, so hop i carries i units.
        return shallow ? n * (n + 1.0) / 2.0 * unit : n * unit;
    }

    // Single hop: node i reaches the sink directly at range i*d; power scales by the
    // spreading law relative to one hop.
    const double base = shallow ? cylindrical_power(hop_distance_m, 1.0) : spherical_power(hop_distance_m, 1.0);
    double total = 0.0;
    for (int i = 1; i <= n_hops; ++i) {
        const double r = hop_distance_m * static_cast<double>(i);
        const double p = shallow ? cylindrical_power(r, 1.0) : spherical_power(r, 1.0);
        total += p / base * unit;
    }
    return total;
}

}  // namespace uwsim::channel
