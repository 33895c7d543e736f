#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "dmimo/common.hpp"
#include "dmimo/estimation.hpp"
#include "dmimo/scenario.hpp"

namespace dmimo {

/// Decision variables: sub-band groups, their bandwidths, user powers and combining weights.
struct Allocation {
    std::vector<std::vector<int>> groups;  // users per sub-band
    std::vector<double> bandwidths;        // Hz, one per group
    std::vector<double> powers;            // W, one per user
    Eigen::MatrixXd weights;               // M x K; only entries of serving satellites are read

    /// band index of each user, -1 when unscheduled.
    std::vector<int> band_of(int num_users) const;
};

/// Unit-norm weights 1/sqrt(|M_k|) on each serving set, zero elsewhere.
Eigen::MatrixXd equal_weights(const Scenario& scenario);

/// Rescale every user's serving weights to unit Euclidean norm.
void normalize_weights(const Scenario& scenario, Eigen::MatrixXd& weights);

/// Equal bandwidth over the non-empty groups (empty ones are dropped), full power, equal weights.
Allocation equal_allocation(const Scenario& scenario, std::vector<std::vector<int>> groups);

/// Split B evenly over the groups.
std::vector<double> equal_bandwidths(const Scenario& scenario, std::size_t groups);

struct SinrTerms {
    int user = 0;
    int band = 0;
    double bandwidth = 0.0;
    double noise = 0.0;           // sub-band noise power
    double ds = 0.0;              // sqrt(p_k) Σ w A; the numerator is ds²
    double i_noise = 0.0;
    std::vector<double> i1;       // per user, zero outside the band
    std::vector<double> i2;       // zero for k itself and outside the band
    std::vector<double> i3;       // zero outside the cohort ∩ band
    double denominator = 0.0;
    double sinr_lb = 0.0;
    double rate_lb = 0.0;

    double signal() const { return ds * ds; }
};

/// Allocation-independent coefficients of the closed-form bound, cached per (m, k, k').
class RateModel {
public:
    RateModel(const Scenario& scenario, const EstimationTable& table);

    const Scenario& scenario() const { return *scenario_; }

    /// A = tr(C_{m,k}) + ||mean_{m,k}||².
    double desired(int m, int k) const { return desired_[idx(m, k)]; }
    /// V = mean'^H C mean' + mean^H R' mean + tr(R' C).
    double leakage(int m, int k, int j) const { return leakage_[idx3(m, k, j)]; }
    /// G = mean_{m,k}^H mean_{m,j}.
    cplx los_cross(int m, int k, int j) const { return los_cross_[idx3(m, k, j)]; }
    /// T = τ sqrt(p_k p_j) tr(R_{m,k} Ψ R_{m,j}), zero outside the cohort.
    cplx pilot_cross(int m, int k, int j) const { return pilot_cross_[idx3(m, k, j)]; }

    SinrTerms terms(const Allocation& allocation, int k) const;
    std::vector<SinrTerms> all_terms(const Allocation& allocation) const;
    double sinr(const Allocation& allocation, int k) const { return terms(allocation, k).sinr_lb; }
    std::vector<double> rates(const Allocation& allocation) const;
    double sum_rate(const Allocation& allocation) const;

    /// Expected interference power from j onto k's combiner (I¹ + I² [+ I³]) times p_j.
    double interference_from(const Allocation& allocation, int k, int j) const;

private:
    std::size_t idx(int m, int k) const { return static_cast<std::size_t>(m) * K_ + k; }
    std::size_t idx3(int m, int k, int j) const { return (static_cast<std::size_t>(m) * K_ + k) * K_ + j; }

    const Scenario* scenario_;
    int K_ = 0;
    std::vector<double> desired_;
    std::vector<double> leakage_;
    std::vector<cplx> los_cross_;
    std::vector<cplx> pilot_cross_;
};

/// Closed-form lower bound of user k. Throws ContractError if k is not scheduled.
SinrTerms sinr_lower_bound(const RateModel& model, const Allocation& allocation, int k);

/// Pure line-of-sight limit of the bound.
double sinr_los_limit(const Scenario& scenario, const Allocation& allocation, int k);

struct McEstimate {
    double mean = 0.0;
    double se = 0.0;
};

/// Monte Carlo counterparts of every closed-form term for one user.
struct UserMonteCarlo {
    int user = 0;
    McEstimate ds2;                 // |DS|², delta-method SE
    McEstimate ls;                  // E|LS|²
    std::vector<McEstimate> ui;     // E|UI_{k,k'}|², per user; zero outside the band
    McEstimate noise;               // E|N|²
    McEstimate ergodic_rate;        // bit/s
    double bound_form_rate = 0.0;   // bit/s, built from the Monte Carlo moments
};

struct MonteCarloReport {
    std::size_t trials = 0;
    std::vector<UserMonteCarlo> users;
    McEstimate sum_ergodic_rate;  // per-draw sum over scheduled users
};

/// Draws channels, pilot noise and data noise on child streams of `seed`, runs the estimator
/// and the combiner, and averages every term. Result is independent of the worker count.
MonteCarloReport monte_carlo_terms(const Scenario& scenario, const EstimationTable& table,
                                   const Allocation& allocation, std::size_t trials, std::uint64_t seed);

/// Ergodic rate of user k with the closed-form DS and per-draw leakage, interference and noise.
McEstimate ergodic_rate_mc(const Scenario& scenario, const EstimationTable& table, const Allocation& allocation,
                           int k, std::size_t trials, std::uint64_t seed);

/// CSV rows: user, term, closed_form, mc_mean, mc_se, trials.
void write_rate_report(std::ostream& out, const RateModel& model, const Allocation& allocation,
                       const MonteCarloReport& report);

}  // namespace dmimo
