#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace dmimo {

/// One row of the elevation-dependent Rician factor table: [min_deg, max_deg).
struct RicianRow {
    double min_deg = 0.0;
    double max_deg = 0.0;
    double k_linear = 0.0;
};

enum class CorrelationModel { identity, exponential };

enum class PilotScheme {
    uniform,      ///< each user draws its pilot uniformly in [0, tau)
    permutation,  ///< shuffled round-robin; every pilot used before any repeats
};

/// Static system description. JSON keys mirror the member names.
struct SystemConfig {
    int num_satellites = 4;
    int num_users = 5;
    int antennas_x = 4;
    int antennas_y = 4;
    double antenna_spacing_ratio = 0.5;  // d_A / lambda
    double carrier_frequency = 2e9;      // Hz
    double total_bandwidth = 1e6;        // Hz
    int num_subbands = 2;
    int pilot_length = 3;
    double pilot_power = 0.2;        // W
    double max_power = 0.2;          // W
    double rate_requirement = 1e4;   // bit/s
    int cluster_size = 2;
    int subband_capacity = 5;
    double tx_gain = 0.0;            // dBi
    double rx_gain = 6.0;            // dBi
    double noise_figure = 9.0;       // dB
    double noise_temperature = 290.0;  // K
    double boltzmann = 1.381e-23;    // J/K
    CorrelationModel correlation_model = CorrelationModel::identity;
    double correlation_r = 0.0;
    std::vector<RicianRow> rician_table;
    std::uint64_t rng_seed = 1;

    // Geometry: spherical Earth, common orbit altitude, per-user elevation
    // drawn uniformly in [elevation_min, elevation_max] plus a per-satellite offset.
    double altitude = 550e3;  // m
    double elevation_min = 20.0;  // deg
    double elevation_max = 20.1;  // deg
    std::vector<double> satellite_elevation_offsets;  // deg, one per satellite or empty

    /// Bypasses the table and applies this K-bar to every link (sweeps).
    std::optional<double> rician_override;
    PilotScheme pilot_scheme = PilotScheme::uniform;

    int num_antennas() const { return antennas_x * antennas_y; }
    double wavelength() const;

    /// Throws ConfigError describing the first violated invariant.
    void validate() const;
};

SystemConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SystemConfig& config);

/// Reads and validates a JSON configuration file.
SystemConfig load_config(const std::filesystem::path& path);

/// Table I link budget with a desk-scale 4x4 array and the shipped Rician table.
SystemConfig default_config();

/// Editable default elevation -> K-bar table shipped with the project.
std::vector<RicianRow> default_rician_table();

}  // namespace dmimo
