#include "dmimo/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dmimo/common.hpp"
#include "dmimo/units.hpp"

namespace dmimo {

namespace {

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

}  // namespace

double SystemConfig::wavelength() const { return units::kSpeedOfLight / carrier_frequency; }

void SystemConfig::validate() const {
    const int K = num_users;
    const int tau = pilot_length;
    const int I = num_subbands;
    const int n_max = subband_capacity;

    require(num_satellites >= 1, "num_satellites must be >= 1");
    require(K >= 1, "num_users must be >= 1");
    require(antennas_x >= 1 && antennas_y >= 1, "antenna counts must be >= 1");
    require(tau >= 1 && tau <= K, "pilot_length must satisfy 1 <= tau <= K");
    require(I >= 1 && (I < K || K == 1), "num_subbands must satisfy 1 <= I < K");
    require(n_max > 0 && n_max <= K, "subband_capacity must satisfy 0 < N_max <= K");
    require(static_cast<long>(I) * n_max >= K, "I * N_max < K: no feasible partition exists");
    require(cluster_size >= 1 && cluster_size <= num_satellites,
            "cluster_size must lie in [1, num_satellites]");

    require(antenna_spacing_ratio > 0.0, "antenna_spacing_ratio must be positive");
    require(carrier_frequency > 0.0, "carrier_frequency must be positive");
    require(total_bandwidth > 0.0, "total_bandwidth must be positive");
    require(pilot_power > 0.0, "pilot_power must be positive");
    require(max_power > 0.0, "max_power must be positive");
    require(rate_requirement >= 0.0, "rate_requirement must be non-negative");
    require(noise_temperature > 0.0, "noise_temperature must be positive");
    require(boltzmann > 0.0, "boltzmann must be positive");
    require(altitude > 0.0, "altitude must be positive");
    require(elevation_min > 0.0 && elevation_min <= elevation_max && elevation_max <= 90.0,
            "elevation range must satisfy 0 < min <= max <= 90");
    require(correlation_r >= 0.0 && correlation_r < 1.0, "correlation_r must lie in [0, 1)");
    require(satellite_elevation_offsets.empty() ||
                static_cast<int>(satellite_elevation_offsets.size()) == num_satellites,
            "satellite_elevation_offsets needs one entry per satellite");
    if (rician_override) {
        require(*rician_override >= 0.0, "rician_override must be non-negative");
    } else {
        require(!rician_table.empty(), "rician_table is required unless rician_override is set");
    }
    for (const auto& row : rician_table) {
        require(row.min_deg < row.max_deg, "rician_table rows need min_deg < max_deg");
        require(row.k_linear >= 0.0, "rician_table k_linear must be non-negative");
    }
}

SystemConfig config_from_json(const nlohmann::json& j) {
    SystemConfig c;
    try {
        read_if(j, "num_satellites", c.num_satellites);
        read_if(j, "num_users", c.num_users);
        read_if(j, "antennas_x", c.antennas_x);
        read_if(j, "antennas_y", c.antennas_y);
        read_if(j, "antenna_spacing_ratio", c.antenna_spacing_ratio);
        read_if(j, "carrier_frequency", c.carrier_frequency);
        read_if(j, "total_bandwidth", c.total_bandwidth);
        read_if(j, "num_subbands", c.num_subbands);
        read_if(j, "pilot_length", c.pilot_length);
        read_if(j, "pilot_power", c.pilot_power);
        read_if(j, "max_power", c.max_power);
        read_if(j, "rate_requirement", c.rate_requirement);
        read_if(j, "cluster_size", c.cluster_size);
        read_if(j, "subband_capacity", c.subband_capacity);
        read_if(j, "tx_gain", c.tx_gain);
        read_if(j, "rx_gain", c.rx_gain);
        read_if(j, "noise_figure", c.noise_figure);
        read_if(j, "noise_temperature", c.noise_temperature);
        read_if(j, "boltzmann", c.boltzmann);
        read_if(j, "rng_seed", c.rng_seed);
        read_if(j, "altitude", c.altitude);
        read_if(j, "elevation_min", c.elevation_min);
        read_if(j, "elevation_max", c.elevation_max);
        read_if(j, "satellite_elevation_offsets", c.satellite_elevation_offsets);

        if (auto it = j.find("correlation_model"); it != j.end()) {
            const auto& cm = *it;
            const std::string type = cm.is_string() ? cm.get<std::string>() : cm.at("type").get<std::string>();
            if (type == "identity") {
                c.correlation_model = CorrelationModel::identity;
            } else if (type == "exponential") {
                c.correlation_model = CorrelationModel::exponential;
                if (cm.is_object()) read_if(cm, "r", c.correlation_r);
            } else {
                throw ConfigError("unknown correlation_model '" + type + "'");
            }
        }
        read_if(j, "correlation_r", c.correlation_r);

        if (auto it = j.find("rician_table"); it != j.end()) {
            c.rician_table.clear();
            for (const auto& row : *it) {
                c.rician_table.push_back(
                    {row.at("min_deg").get<double>(), row.at("max_deg").get<double>(), row.at("k_linear").get<double>()});
            }
        }
        if (auto it = j.find("rician_override"); it != j.end() && !it->is_null()) {
            c.rician_override = it->get<double>();
        }
        if (auto it = j.find("pilot_scheme"); it != j.end()) {
            const auto s = it->get<std::string>();
            if (s == "uniform") {
                c.pilot_scheme = PilotScheme::uniform;
            } else if (s == "permutation") {
                c.pilot_scheme = PilotScheme::permutation;
            } else {
                throw ConfigError("unknown pilot_scheme '" + s + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    }
    return c;
}

nlohmann::json config_to_json(const SystemConfig& c) {
    nlohmann::json j;
    j["num_satellites"] = c.num_satellites;
    j["num_users"] = c.num_users;
    j["antennas_x"] = c.antennas_x;
    j["antennas_y"] = c.antennas_y;
    j["antenna_spacing_ratio"] = c.antenna_spacing_ratio;
    j["carrier_frequency"] = c.carrier_frequency;
    j["total_bandwidth"] = c.total_bandwidth;
    j["num_subbands"] = c.num_subbands;
    j["pilot_length"] = c.pilot_length;
    j["pilot_power"] = c.pilot_power;
    j["max_power"] = c.max_power;
    j["rate_requirement"] = c.rate_requirement;
    j["cluster_size"] = c.cluster_size;
    j["subband_capacity"] = c.subband_capacity;
    j["tx_gain"] = c.tx_gain;
    j["rx_gain"] = c.rx_gain;
    j["noise_figure"] = c.noise_figure;
    j["noise_temperature"] = c.noise_temperature;
    j["boltzmann"] = c.boltzmann;
    j["correlation_model"] = {
        {"type", c.correlation_model == CorrelationModel::identity ? "identity" : "exponential"},
        {"r", c.correlation_r}};
    auto table = nlohmann::json::array();
    for (const auto& row : c.rician_table) {
        table.push_back({{"min_deg", row.min_deg}, {"max_deg", row.max_deg}, {"k_linear", row.k_linear}});
    }
    j["rician_table"] = table;
    j["rng_seed"] = c.rng_seed;
    j["altitude"] = c.altitude;
    j["elevation_min"] = c.elevation_min;
    j["elevation_max"] = c.elevation_max;
    j["satellite_elevation_offsets"] = c.satellite_elevation_offsets;
    j["rician_override"] = c.rician_override ? nlohmann::json(*c.rician_override) : nlohmann::json(nullptr);
    j["pilot_scheme"] = c.pilot_scheme == PilotScheme::uniform ? "uniform" : "permutation";
    return j;
}

SystemConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
    SystemConfig c = config_from_json(j);
    c.validate();
    return c;
}

std::vector<RicianRow> default_rician_table() {
    // Monotone in elevation; replace with deployment-specific values as needed.
    return {
        {10.0, 20.0, 5.0},   {20.0, 30.0, 10.0}, {30.0, 40.0, 12.6}, {40.0, 50.0, 15.8},
        {50.0, 60.0, 20.0},  {60.0, 70.0, 25.1}, {70.0, 80.0, 31.6}, {80.0, 90.0001, 39.8},
    };
}

SystemConfig default_config() {
    SystemConfig c;
    c.rician_table = default_rician_table();
    c.satellite_elevation_offsets = {0.0, 3.0, 6.0, 9.0};
    return c;
}

}  // namespace dmimo
