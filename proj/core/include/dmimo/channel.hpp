#pragma once

#include <vector>

#include "dmimo/common.hpp"
#include "dmimo/config.hpp"
#include "dmimo/random.hpp"
#include "dmimo/scenario.hpp"

namespace dmimo {

/// UPA steering vector a^x ⊗ a^y, exponents indexed from n = 0.
CVector steering_vector(double elevation, double azimuth, int antennas_x, int antennas_y, double spacing_ratio);

/// PSD square root through a self-adjoint eigendecomposition; negative eigenvalues are clipped.
CMatrix hermitian_sqrt(const CMatrix& a);

Correlation correlation_matrix(CorrelationModel model, int n, double r);

/// One draw of every h_{m,k}; the random part is kept so h can be rebuilt from its pieces.
struct ChannelRealization {
    int num_users = 0;
    std::vector<CVector> h;        // [m * K + k]
    std::vector<CVector> scatter;  // i.i.d. CN(0, I) draw h-tilde

    const CVector& at(int m, int k) const { return h[static_cast<std::size_t>(m) * num_users + k]; }
    const CVector& scatter_at(int m, int k) const { return scatter[static_cast<std::size_t>(m) * num_users + k]; }
};

ChannelRealization sample_channel(const Scenario& scenario, Rng& rng);

/// sqrt(a) * (sqrt(K-bar) los + Δ^{1/2} scatter) for one link.
CVector compose_channel(const LinkStats& link, const CVector& scatter);

}  // namespace dmimo
