#include "dmimo/channel.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "dmimo/scenario.hpp"
#include "dmimo/units.hpp"

namespace dmimo {

CVector steering_vector(double elevation, double azimuth, int antennas_x, int antennas_y, double spacing_ratio) {
    if (antennas_x < 1 || antennas_y < 1) throw DomainError("steering_vector: antenna counts must be >= 1");
    const double kx = -2.0 * units::kPi * spacing_ratio * std::sin(elevation) * std::cos(azimuth);
    const double ky = -2.0 * units::kPi * spacing_ratio * std::cos(elevation);
    CVector out(static_cast<Eigen::Index>(antennas_x) * antennas_y);
    for (int nx = 0; nx < antennas_x; ++nx) {
        const cplx ax = std::polar(1.0, kx * nx);
        for (int ny = 0; ny < antennas_y; ++ny) {
            out[nx * antennas_y + ny] = ax * std::polar(1.0, ky * ny);
        }
    }
    return out;
}

CMatrix hermitian_sqrt(const CMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(a);
    if (eig.info() != Eigen::Success) throw DomainError("hermitian_sqrt: eigendecomposition failed");
    const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().adjoint();
}

Correlation correlation_matrix(CorrelationModel model, int n, double r) {
    if (n < 1) throw DomainError("correlation_matrix: size must be >= 1");
    Correlation c;
    if (model == CorrelationModel::identity) {
        c.delta = CMatrix::Identity(n, n);
        c.sqrt = c.delta;
        return c;
    }
    if (r < 0.0 || r >= 1.0) throw DomainError("correlation_matrix: r must lie in [0, 1)");
    c.delta.resize(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) c.delta(i, j) = std::pow(r, std::abs(i - j));
    }
    c.sqrt = r == 0.0 ? c.delta : hermitian_sqrt(c.delta);
    return c;
}

CVector compose_channel(const LinkStats& link, const CVector& scatter) {
    return link.mean() + std::sqrt(link.scale) * (link.correlation->sqrt * scatter);
}

ChannelRealization sample_channel(const Scenario& scenario, Rng& rng) {
    const int M = scenario.num_satellites();
    const int K = scenario.num_users();
    const int N = scenario.num_antennas();
    ChannelRealization out;
    out.num_users = K;
    out.h.reserve(static_cast<std::size_t>(M) * K);
    out.scatter.reserve(static_cast<std::size_t>(M) * K);
    for (int m = 0; m < M; ++m) {
        for (int k = 0; k < K; ++k) {
            CVector draw = complex_normal_vector(rng, N);
            out.h.push_back(compose_channel(scenario.link(m, k), draw));
            out.scatter.push_back(std::move(draw));
        }
    }
    return out;
}

}  // namespace dmimo
