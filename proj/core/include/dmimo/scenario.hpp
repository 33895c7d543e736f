#pragma once

#include <memory>
#include <span>
#include <vector>

#include "dmimo/common.hpp"
#include "dmimo/config.hpp"
#include "dmimo/random.hpp"

namespace dmimo {

/// Spatial correlation Δ together with its Hermitian square root.
struct Correlation {
    CMatrix delta;
    CMatrix sqrt;
};

/// Statistical description of the link between satellite m and user k.
struct LinkStats {
    double beta = 0.0;       // large-scale gain, linear
    double rician = 0.0;     // K-bar, linear
    double scale = 0.0;      // a = beta / (K-bar + 1)
    double elevation = 0.0;  // rad
    double azimuth = 0.0;    // rad
    double distance = 0.0;   // m
    CVector los;             // unit-modulus steering vector, ||los||^2 = N
    std::shared_ptr<const Correlation> correlation;

    /// Deterministic part sqrt(K-bar * a) * los.
    CVector mean() const;
    /// R = a * Δ.
    CMatrix covariance() const;
};

LinkStats make_link(double beta, double rician, double elevation, double azimuth, double distance,
                    const SystemConfig& config, std::shared_ptr<const Correlation> correlation);

struct PilotAssignment {
    int pilot_length = 1;
    std::vector<int> pilot_index;
    std::vector<std::vector<int>> cohorts;  // cohorts[k] lists users sharing k's pilot, k included

    static PilotAssignment from_indices(std::vector<int> indices, int pilot_length);
    bool share_pilot(int k, int j) const { return pilot_index[k] == pilot_index[j]; }
    int num_users() const { return static_cast<int>(pilot_index.size()); }
};

/// Thermal noise power over a bandwidth in Hz.
double noise_power(double bandwidth, const SystemConfig& config);

/// Free-space gain including antenna gains, linear.
double path_gain(double distance, const SystemConfig& config);

/// Rician factor for an elevation in degrees; rows are half-open [min, max).
double rician_factor_lookup(double elevation_deg, std::span<const RicianRow> table);

/// Spherical-Earth slant range to a satellite at the given altitude.
double slant_range(double elevation_rad, double altitude);

/// Indices of the `cluster_size` largest gains, ascending index order; ties go to the lower index.
std::vector<int> select_serving_satellites(std::span<const double> betas, int cluster_size);

PilotAssignment assign_pilots_random(int num_users, int pilot_length, Rng& rng);
PilotAssignment assign_pilots_permutation(int num_users, int pilot_length, Rng& rng);

class Scenario {
public:
    /// links is row-major by satellite: links[m * K + k].
    Scenario(SystemConfig config, std::vector<LinkStats> links, PilotAssignment pilots,
             std::vector<std::vector<int>> serving);

    const SystemConfig& config() const { return config_; }
    int num_satellites() const { return config_.num_satellites; }
    int num_users() const { return config_.num_users; }
    int num_antennas() const { return config_.num_antennas(); }

    const LinkStats& link(int m, int k) const { return links_[static_cast<std::size_t>(m) * num_users() + k]; }
    const PilotAssignment& pilots() const { return pilots_; }
    const std::vector<int>& serving(int k) const { return serving_[k]; }
    bool serves(int m, int k) const { return serving_mask_[static_cast<std::size_t>(m) * num_users() + k]; }

    double noise_power(double bandwidth) const { return dmimo::noise_power(bandwidth, config_); }
    /// Pilots occupy the whole band, so estimation sees full-band noise.
    double estimation_noise() const { return noise_power(config_.total_bandwidth); }

    /// Copy with every link's Rician factor replaced (geometry and draws kept).
    Scenario with_rician(double rician) const;
    /// Copy with a different pilot assignment.
    Scenario with_pilots(PilotAssignment pilots) const;

private:
    SystemConfig config_;
    std::vector<LinkStats> links_;
    PilotAssignment pilots_;
    std::vector<std::vector<int>> serving_;
    std::vector<char> serving_mask_;
};

Scenario build_scenario(const SystemConfig& config, Rng& rng);

}  // namespace dmimo
