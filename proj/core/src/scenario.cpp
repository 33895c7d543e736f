#include "dmimo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dmimo/channel.hpp"
#include "dmimo/units.hpp"

namespace dmimo {

CVector LinkStats::mean() const {
    if (rician <= 0.0) return CVector::Zero(los.size());
    return std::sqrt(beta / (1.0 + 1.0 / rician)) * los;
}

CMatrix LinkStats::covariance() const { return scale * correlation->delta; }

LinkStats make_link(double beta, double rician, double elevation, double azimuth, double distance,
                    const SystemConfig& config, std::shared_ptr<const Correlation> correlation) {
    LinkStats link;
    link.beta = beta;
    link.rician = rician;
    link.scale = beta / (rician + 1.0);
    link.elevation = elevation;
    link.azimuth = azimuth;
    link.distance = distance;
    link.los = steering_vector(elevation, azimuth, config.antennas_x, config.antennas_y, config.antenna_spacing_ratio);
    link.correlation = std::move(correlation);
    return link;
}

PilotAssignment PilotAssignment::from_indices(std::vector<int> indices, int pilot_length) {
    PilotAssignment p;
    p.pilot_length = pilot_length;
    p.pilot_index = std::move(indices);
    const int K = p.num_users();
    p.cohorts.assign(K, {});
    for (int k = 0; k < K; ++k) {
        if (p.pilot_index[k] < 0 || p.pilot_index[k] >= pilot_length) {
            throw ConfigError("pilot index out of range");
        }
        for (int j = 0; j < K; ++j) {
            if (p.pilot_index[j] == p.pilot_index[k]) p.cohorts[k].push_back(j);
        }
    }
    return p;
}

double noise_power(double bandwidth, const SystemConfig& config) {
    if (!(bandwidth > 0.0)) throw DomainError("noise_power: bandwidth must be positive");
    return bandwidth * config.boltzmann * config.noise_temperature * units::db_to_linear(config.noise_figure);
}

double path_gain(double distance, const SystemConfig& config) {
    if (!(distance > 0.0)) throw DomainError("path_gain: distance must be positive");
    if (!(config.carrier_frequency > 0.0)) throw DomainError("path_gain: carrier frequency must be positive");
    const double fspl = 20.0 * std::log10(4.0 * units::kPi * distance * config.carrier_frequency / units::kSpeedOfLight);
    const double loss_db = fspl - config.rx_gain - config.tx_gain;
    return units::db_to_linear(-loss_db);
}

double rician_factor_lookup(double elevation_deg, std::span<const RicianRow> table) {
    for (const auto& row : table) {
        if (elevation_deg >= row.min_deg && elevation_deg < row.max_deg) return row.k_linear;
    }
    std::ostringstream msg;
    msg << "rician table does not cover elevation " << elevation_deg << " deg";
    throw ConfigError(msg.str());
}

double slant_range(double elevation_rad, double altitude) {
    const double re = units::kEarthRadius;
    const double rs = re + altitude;
    const double c = re * std::cos(elevation_rad);
    return std::sqrt(rs * rs - c * c) - re * std::sin(elevation_rad);
}

std::vector<int> select_serving_satellites(std::span<const double> betas, int cluster_size) {
    const int M = static_cast<int>(betas.size());
    if (cluster_size < 1 || cluster_size > M) throw DomainError("select_serving_satellites: bad cluster size");
    std::vector<int> order(M);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return betas[a] > betas[b]; });
    order.resize(cluster_size);
    std::sort(order.begin(), order.end());
    return order;
}

PilotAssignment assign_pilots_random(int num_users, int pilot_length, Rng& rng) {
    if (pilot_length < 1) throw DomainError("assign_pilots_random: pilot length must be >= 1");
    std::uniform_int_distribution<int> pick(0, pilot_length - 1);
    std::vector<int> idx(num_users);
    for (auto& i : idx) i = pick(rng);
    return PilotAssignment::from_indices(std::move(idx), pilot_length);
}

PilotAssignment assign_pilots_permutation(int num_users, int pilot_length, Rng& rng) {
    if (pilot_length < 1) throw DomainError("assign_pilots_permutation: pilot length must be >= 1");
    std::vector<int> idx(num_users);
    for (int k = 0; k < num_users; ++k) idx[k] = k % pilot_length;
    std::shuffle(idx.begin(), idx.end(), rng);
    return PilotAssignment::from_indices(std::move(idx), pilot_length);
}

Scenario::Scenario(SystemConfig config, std::vector<LinkStats> links, PilotAssignment pilots,
                   std::vector<std::vector<int>> serving)
    : config_(std::move(config)), links_(std::move(links)), pilots_(std::move(pilots)), serving_(std::move(serving)) {
    const int M = config_.num_satellites;
    const int K = config_.num_users;
    if (static_cast<int>(links_.size()) != M * K) throw ConfigError("Scenario: expected M*K links");
    if (pilots_.num_users() != K) throw ConfigError("Scenario: pilot assignment size mismatch");
    if (static_cast<int>(serving_.size()) != K) throw ConfigError("Scenario: serving set count mismatch");
    serving_mask_.assign(static_cast<std::size_t>(M) * K, 0);
    for (int k = 0; k < K; ++k) {
        if (serving_[k].empty()) throw ConfigError("Scenario: empty serving set");
        for (int m : serving_[k]) {
            if (m < 0 || m >= M) throw ConfigError("Scenario: serving satellite out of range");
            serving_mask_[static_cast<std::size_t>(m) * K + k] = 1;
        }
    }
    for (const auto& l : links_) {
        if (l.los.size() != config_.num_antennas() || !l.correlation) {
            throw ConfigError("Scenario: link dimension mismatch");
        }
    }
}

Scenario Scenario::with_rician(double rician) const {
    std::vector<LinkStats> links = links_;
    for (auto& l : links) {
        l.rician = rician;
        l.scale = l.beta / (rician + 1.0);
    }
    SystemConfig c = config_;
    c.rician_override = rician;
    return Scenario(std::move(c), std::move(links), pilots_, serving_);
}

Scenario Scenario::with_pilots(PilotAssignment pilots) const {
    return Scenario(config_, links_, std::move(pilots), serving_);
}

Scenario build_scenario(const SystemConfig& config, Rng& rng) {
    config.validate();
    const int M = config.num_satellites;
    const int K = config.num_users;
    auto corr = std::make_shared<const Correlation>(
        correlation_matrix(config.correlation_model, config.num_antennas(), config.correlation_r));

    std::uniform_real_distribution<double> elev(config.elevation_min, config.elevation_max);
    std::uniform_real_distribution<double> azim(0.0, 2.0 * units::kPi);
    std::vector<double> base(K);
    for (auto& e : base) e = elev(rng);

    std::vector<LinkStats> links;
    links.reserve(static_cast<std::size_t>(M) * K);
    for (int m = 0; m < M; ++m) {
        const double offset = config.satellite_elevation_offsets.empty() ? 0.0 : config.satellite_elevation_offsets[m];
        for (int k = 0; k < K; ++k) {
            const double elevation_deg = std::min(base[k] + offset, 90.0);
            const double elevation = units::deg_to_rad(elevation_deg);
            const double distance = slant_range(elevation, config.altitude);
            const double rician = config.rician_override ? *config.rician_override
                                                         : rician_factor_lookup(elevation_deg, config.rician_table);
            links.push_back(make_link(path_gain(distance, config), rician, elevation, azim(rng), distance, config, corr));
        }
    }

    PilotAssignment pilots = config.pilot_scheme == PilotScheme::uniform
                                 ? assign_pilots_random(K, config.pilot_length, rng)
                                 : assign_pilots_permutation(K, config.pilot_length, rng);

    std::vector<std::vector<int>> serving(K);
    std::vector<double> betas(M);
    for (int k = 0; k < K; ++k) {
        for (int m = 0; m < M; ++m) betas[m] = links[static_cast<std::size_t>(m) * K + k].beta;
        serving[k] = select_serving_satellites(betas, config.cluster_size);
    }
    return Scenario(config, std::move(links), std::move(pilots), std::move(serving));
}

}  // namespace dmimo
