#pragma once

#include <memory>
#include <vector>

#include "dmimo/channel.hpp"
#include "dmimo/config.hpp"
#include "dmimo/scenario.hpp"

namespace dmimo::test {

/// Hand-built scenario: every link gets the same beta and K-bar, angles from `rng`.
inline Scenario synthetic_scenario(SystemConfig c, double beta, double rician, const std::vector<int>& pilots,
                                   std::uint64_t seed = 1) {
    c.num_users = static_cast<int>(pilots.size());
    Rng rng(seed);
    std::uniform_real_distribution<double> angle(0.1, 1.5);
    auto corr = std::make_shared<const Correlation>(
        correlation_matrix(c.correlation_model, c.num_antennas(), c.correlation_r));
    std::vector<LinkStats> links;
    for (int m = 0; m < c.num_satellites; ++m) {
        for (int k = 0; k < c.num_users; ++k) {
            links.push_back(make_link(beta, rician, angle(rng), 4.0 * angle(rng), 1e6, c, corr));
        }
    }
    std::vector<std::vector<int>> serving(c.num_users);
    for (int k = 0; k < c.num_users; ++k) {
        for (int m = 0; m < c.cluster_size; ++m) serving[k].push_back(m);
    }
    return Scenario(c, std::move(links), PilotAssignment::from_indices(pilots, c.pilot_length), std::move(serving));
}

/// Small configuration for quick checks.
inline SystemConfig small_config(int satellites, int users, int n, int tau) {
    auto c = default_config();
    c.num_satellites = satellites;
    c.num_users = users;
    c.antennas_x = n;
    c.antennas_y = 1;
    c.pilot_length = tau;
    c.cluster_size = satellites;
    c.num_subbands = 1;
    c.subband_capacity = users;
    c.satellite_elevation_offsets.clear();
    return c;
}

}  // namespace dmimo::test
