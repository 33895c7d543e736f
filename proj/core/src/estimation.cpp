#include "dmimo/estimation.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace dmimo {

namespace {

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

// tr(A B) without forming the product.
cplx trace_product(const CMatrix& a, const CMatrix& b) { return a.cwiseProduct(b.transpose()).sum(); }

}  // namespace

CMatrix covariance_R(const LinkStats& link) { return link.covariance(); }

CMatrix psi_matrix(std::span<const CohortMember> cohort, int pilot_length, double noise) {
    if (!(noise > 0.0)) throw DomainError("psi_matrix: noise power must be positive");
    if (cohort.empty()) throw DomainError("psi_matrix: empty cohort");
    const Eigen::Index n = cohort.front().link->los.size();
    CMatrix s = noise * CMatrix::Identity(n, n);
    for (const auto& member : cohort) s += pilot_length * member.pilot_power * member.link->covariance();
    Eigen::LLT<CMatrix> llt(hermitian_part(s));
    if (llt.info() != Eigen::Success) throw DomainError("psi_matrix: regularized sum is not positive definite");
    return hermitian_part(llt.solve(CMatrix::Identity(n, n)));
}

CVector mmse_estimate(const CVector& observation, const LinkStats& link, double pilot_power,
                      std::span<const CohortMember> cohort, int pilot_length, const CMatrix& psi) {
    CVector residual = observation;
    for (const auto& member : cohort) {
        residual -= std::sqrt(pilot_length * member.pilot_power) * member.link->mean();
    }
    return link.mean() + std::sqrt(pilot_length * pilot_power) * (link.covariance() * (psi * residual));
}

double mse(const CMatrix& r, const CMatrix& psi, int pilot_length, double pilot_power) {
    const CMatrix rpsi = r * psi;
    return (r.trace() - pilot_length * pilot_power * trace_product(rpsi, r)).real();
}

double nmse(const CMatrix& r, const CMatrix& psi, int pilot_length, double pilot_power) {
    const double tr = r.trace().real();
    if (!(tr > 0.0)) throw DegenerateError("nmse: tr(R) = 0, NMSE undefined (limit is 1)");
    return mse(r, psi, pilot_length, pilot_power) / tr;
}

EstimationTable::EstimationTable(const Scenario& scenario)
    : num_users_(scenario.num_users()),
      pilot_length_(scenario.pilots().pilot_length),
      pilot_power_(scenario.num_users(), scenario.config().pilot_power),
      pilots_(scenario.pilots()) {
    const int M = scenario.num_satellites();
    const int K = num_users_;
    const int tau = pilot_length_;
    const double noise = scenario.estimation_noise();
    links_.resize(static_cast<std::size_t>(M) * K);
    for (int m = 0; m < M; ++m) {
        for (int q = 0; q < tau; ++q) {
            std::vector<CohortMember> cohort;
            for (int k = 0; k < K; ++k) {
                if (pilots_.pilot_index[k] == q) cohort.push_back({&scenario.link(m, k), pilot_power_[k]});
            }
            if (cohort.empty()) continue;
            const int slot = static_cast<int>(psi_.size());
            psi_.push_back(psi_matrix(cohort, tau, noise));
            const CMatrix& psi = psi_.back();
            for (int k = 0; k < K; ++k) {
                if (pilots_.pilot_index[k] != q) continue;
                auto& le = links_[static_cast<std::size_t>(m) * K + k];
                le.psi_slot = slot;
                le.r = scenario.link(m, k).covariance();
                const CMatrix rpsi = le.r * psi;
                const double g = tau * pilot_power_[k];
                le.filter = std::sqrt(g) * rpsi;
                le.c = hermitian_part(g * rpsi * le.r);
                le.e = le.r - le.c;
            }
        }
    }
}

double EstimationTable::mse(int m, int k) const {
    const auto& le = at(m, k);
    return le.e.trace().real();
}

double EstimationTable::nmse(int m, int k) const {
    const auto& le = at(m, k);
    const double tr = le.r.trace().real();
    if (!(tr > 0.0)) throw DegenerateError("nmse: tr(R) = 0, NMSE undefined (limit is 1)");
    return le.e.trace().real() / tr;
}

cplx EstimationTable::cross_trace(int m, int k, int j) const {
    if (!pilots_.share_pilot(k, j)) return {0.0, 0.0};
    return std::sqrt(pilot_length_ * pilot_power_[j]) * trace_product(at(m, k).filter, at(m, j).r);
}

PilotObservation observe_pilots(const Scenario& scenario, const ChannelRealization& channel, Rng& rng) {
    const int M = scenario.num_satellites();
    const int tau = scenario.pilots().pilot_length;
    const double noise = scenario.estimation_noise();
    std::vector<CVector> draws;
    draws.reserve(static_cast<std::size_t>(M) * tau);
    for (int i = 0; i < M * tau; ++i) draws.push_back(complex_normal_vector(rng, scenario.num_antennas(), noise));
    return observe_pilots(scenario, channel, std::move(draws));
}

PilotObservation observe_pilots(const Scenario& scenario, const ChannelRealization& channel,
                                std::vector<CVector> noise) {
    const int M = scenario.num_satellites();
    const int K = scenario.num_users();
    const int tau = scenario.pilots().pilot_length;
    if (static_cast<int>(noise.size()) != M * tau) throw ContractError("observe_pilots: noise size mismatch");
    PilotObservation obs;
    obs.pilot_length = tau;
    obs.y = noise;
    obs.noise = std::move(noise);
    const double p = scenario.config().pilot_power;
    for (int m = 0; m < M; ++m) {
        for (int k = 0; k < K; ++k) {
            obs.y[static_cast<std::size_t>(m) * tau + scenario.pilots().pilot_index[k]] +=
                std::sqrt(tau * p) * channel.at(m, k);
        }
    }
    return obs;
}

ChannelEstimate estimate_channels(const Scenario& scenario, const EstimationTable& table,
                                  const PilotObservation& observation) {
    const int M = scenario.num_satellites();
    const int K = scenario.num_users();
    const int tau = table.pilot_length();
    const auto& pilots = scenario.pilots();

    // Cohort LoS offset per (m, pilot), removed once and shared by every cohort member.
    std::vector<CVector> offset(static_cast<std::size_t>(M) * tau, CVector::Zero(scenario.num_antennas()));
    for (int m = 0; m < M; ++m) {
        for (int k = 0; k < K; ++k) {
            offset[static_cast<std::size_t>(m) * tau + pilots.pilot_index[k]] +=
                std::sqrt(tau * table.pilot_power(k)) * scenario.link(m, k).mean();
        }
    }
    ChannelEstimate est;
    est.num_users = K;
    est.h_hat.reserve(static_cast<std::size_t>(M) * K);
    for (int m = 0; m < M; ++m) {
        for (int k = 0; k < K; ++k) {
            const std::size_t slot = static_cast<std::size_t>(m) * tau + pilots.pilot_index[k];
            const CVector residual = observation.y[slot] - offset[slot];
            est.h_hat.push_back(scenario.link(m, k).mean() + table.at(m, k).filter * residual);
        }
    }
    return est;
}

}  // namespace dmimo
