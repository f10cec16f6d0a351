#pragma once

// Underwater acoustic channel physics: sound speed, ambient noise, absorption,
// transmission loss, SNR/capacity, delay, depth from pressure and the linear
// chain energy models. Every function here is pure.
//
// Units: frequencies in kHz for the empirical formulas, distances in m,
// pressures in Pa, absorption in dB/km, noise in dB re 1 uPa^2/Hz.

#include <span>

#include "uwsim/types.hpp"

namespace uwsim::channel {

struct Environment {
    double temperature_celsius = 4.0;
    double salinity_ppt = 30.0;
    double ph = 8.0;
    double wind_speed_mps = 0.0;   // [0, 10]
    double shipping_factor = 0.5;  // [0, 1]
    double water_density_kg_m3 = 1025.0;
    double gravity_mps2 = 9.81;

    /// Throws DomainError naming the first out-of-range field.
    void validate() const;
};

struct ChannelSample {
    double frequency_khz = 30.5;
    double distance_m = 0.0;
    double depth_m = 0.0;
    double bandwidth_hz = 30000.0;
};

struct NoiseBreakdown {
    double turbulence_db = 0.0;
    double shipping_db = 0.0;
    double wind_db = 0.0;
    double thermal_db = 0.0;
    double total_db = 0.0;
};

struct DelayBreakdown {
    double processing_s = 0.0;
    double queuing_s = 0.0;
    double propagation_s = 0.0;
    double transmission_s = 0.0;
    double total_s = 0.0;
};

enum class SoundSpeedMode {
    literal,       // d^3 coefficient 7.139e-3 exactly as printed
    mackenzie_corrected,  // Mackenzie (1981) coefficient 7.139e-13
};

enum class AbsorptionVariant {
    as_printed,      // salinity divisor 25, pH exponent divisor e^0.56
    ainslie_mccolm,  // salinity divisor 35, pH exponent divisor 0.56
};

enum class Geometry {
    shallow_cylindrical,
    deep_spherical,
    practical,  // 10*k*log10(r) + absorption, k = spreading factor
};

/// Parameters of the link budget that are scenario configuration rather than physics.
struct PropagationConfig {
    double shallow_coefficient = 10.0;  // printed value is 100
    double spreading_factor = 1.3;      // only used by Geometry::practical
    double anomaly_db = 0.0;            // deep-water "A" term
    double absorption_depth_m = 1000.0; // reference depth fed to the absorption formula
    AbsorptionVariant absorption = AbsorptionVariant::as_printed;
};

double sound_speed(const Environment& env, double depth_m,
                   SoundSpeedMode mode = SoundSpeedMode::mackenzie_corrected);

NoiseBreakdown ambient_noise(const Environment& env, double frequency_khz);

/// Noise power over `bandwidth_hz` in dB, flat at the carrier's spectral density.
double band_noise_db(const Environment& env, double frequency_khz, double bandwidth_hz);

/// Source level in dB re 1 uPa @ 1 m of an omnidirectional projector radiating `watts`.
double source_level_db(double watts);

double boric_acid_relaxation_khz(const Environment& env);
double magnesium_sulfate_relaxation_khz(const Environment& env);

double absorption_db_per_km(const Environment& env, double frequency_khz, double depth_km,
                            AbsorptionVariant variant = AbsorptionVariant::as_printed);

struct DepthAttenuation {
    double db_per_km = 0.0;
    bool clamped = false;  // linear depth factor went negative; nonphysical depth
};

DepthAttenuation attenuation_at_depth(double alpha_surface, double depth_m);

/// coeff * log10(r1 / r2); zero when the two radii coincide.
double cylindrical_spreading_loss_db(double r1_m, double r2_m, double coefficient);

/// 20 log10(r) + alpha * r / 1000 + A.
double deep_spherical_loss_db(double r_m, double alpha_db_per_km, double anomaly_db);

double transmission_loss(Geometry geometry, double r_m, double frequency_khz, const Environment& env,
                         const PropagationConfig& config = {});

double capacity_bps(double snr_linear, double bandwidth_hz);

struct SnrCapacity {
    double snr_linear = 0.0;
    double capacity_bps = 0.0;
};

/// Received power is `tx_power_w` at source level minus the transmission loss over
/// `sample.distance_m`; noise is the band noise around the carrier.
SnrCapacity snr_and_capacity(double tx_power_w, const ChannelSample& sample, const Environment& env,
                             Geometry geometry, const PropagationConfig& config = {});

DelayBreakdown delay(std::span<const double> hop_distances_m, double sound_speed_mps, double packet_bits,
                     double bitrate_bps, double processing_s = 0.0, double queuing_s = 0.0);

double depth_difference(double pressure_a_pa, double pressure_b_pa, const Environment& env);

double cylindrical_power(double radius_m, double height_m);
double spherical_power(double radius_m, double intensity);

enum class RelayMode { multi_hop, single_hop };

/// Total energy of a linear chain of `n_hops` equally spaced nodes each delivering
/// `packets` packets to the sink. `per_hop_tx_energy` is the energy to send one
/// packet across one hop.
double linear_chain_energy(Geometry geometry, RelayMode mode, int n_hops, double hop_distance_m,
                           double per_hop_tx_energy, int packets);

}  // namespace uwsim::channel
