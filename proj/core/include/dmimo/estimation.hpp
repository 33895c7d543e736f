#pragma once

#include <span>
#include <vector>

#include "dmimo/channel.hpp"
#include "dmimo/common.hpp"
#include "dmimo/random.hpp"
#include "dmimo/scenario.hpp"

namespace dmimo {

struct CohortMember {
    const LinkStats* link = nullptr;
    double pilot_power = 0.0;
};

/// R = a Δ.
CMatrix covariance_R(const LinkStats& link);

/// (Σ_j τ p_j R_j + σ² I)^{-1} over a pilot cohort.
CMatrix psi_matrix(std::span<const CohortMember> cohort, int pilot_length, double noise);

/// MMSE estimate of one link from its despread pilot observation. Every cohort member's
/// LoS contribution is removed before filtering.
CVector mmse_estimate(const CVector& observation, const LinkStats& link, double pilot_power,
                      std::span<const CohortMember> cohort, int pilot_length, const CMatrix& psi);

/// Error-covariance trace tr(R - τ p R Ψ R).
double mse(const CMatrix& r, const CMatrix& psi, int pilot_length, double pilot_power);
/// mse / tr(R); throws DegenerateError when tr(R) = 0.
double nmse(const CMatrix& r, const CMatrix& psi, int pilot_length, double pilot_power);

struct LinkEstimation {
    CMatrix r;       // channel covariance
    CMatrix c;       // covariance of the estimate, τ p R Ψ R
    CMatrix e;       // error covariance, R - C
    CMatrix filter;  // sqrt(τ p) R Ψ
    int psi_slot = 0;
};

/// Estimation statistics for every (satellite, user) pair of a scenario.
class EstimationTable {
public:
    explicit EstimationTable(const Scenario& scenario);

    const LinkEstimation& at(int m, int k) const { return links_[static_cast<std::size_t>(m) * num_users_ + k]; }
    /// Ψ shared by the cohort of user k at satellite m.
    const CMatrix& psi(int m, int k) const { return psi_[at(m, k).psi_slot]; }

    double mse(int m, int k) const;
    double nmse(int m, int k) const;

    /// τ sqrt(p_k p_j) tr(R_{m,k} Ψ R_{m,j}) for cohort members k, j; zero otherwise.
    cplx cross_trace(int m, int k, int j) const;

    int num_users() const { return num_users_; }
    int pilot_length() const { return pilot_length_; }
    double pilot_power(int k) const { return pilot_power_[k]; }
    const PilotAssignment& pilots() const { return pilots_; }

private:
    int num_users_ = 0;
    int pilot_length_ = 1;
    std::vector<double> pilot_power_;
    PilotAssignment pilots_;
    std::vector<LinkEstimation> links_;
    std::vector<CMatrix> psi_;
};

/// Despread pilot observations y_{m,q} = Σ_{j on pilot q} sqrt(τ p_j) h_{m,j} + n_{m,q}.
struct PilotObservation {
    int pilot_length = 1;
    std::vector<CVector> y;      // [m * τ + q]
    std::vector<CVector> noise;  // [m * τ + q]

    const CVector& at(int m, int q) const { return y[static_cast<std::size_t>(m) * pilot_length + q]; }
};

PilotObservation observe_pilots(const Scenario& scenario, const ChannelRealization& channel, Rng& rng);

/// Observation assembled from a given noise set (noise[m * τ + q]).
PilotObservation observe_pilots(const Scenario& scenario, const ChannelRealization& channel,
                                std::vector<CVector> noise);

struct ChannelEstimate {
    int num_users = 0;
    std::vector<CVector> h_hat;  // [m * K + k]

    const CVector& at(int m, int k) const { return h_hat[static_cast<std::size_t>(m) * num_users + k]; }
};

ChannelEstimate estimate_channels(const Scenario& scenario, const EstimationTable& table,
                                  const PilotObservation& observation);

}  // namespace dmimo
