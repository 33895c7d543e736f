#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmimo/optimizer/gp.hpp"
#include "dmimo/rate.hpp"

namespace dmimo {

enum class WeightMode { optimize, fixed };

/// 2^{R/B} − 1.
double required_sinr(double requirement, double bandwidth);

/// Variable indices of a power/weight GP. Per-user vectors are indexed by user id; -1 when absent.
struct PowerGpLayout {
    std::vector<int> chi;
    std::vector<int> power;                 // normalized p / P^{max}
    std::vector<std::vector<int>> weight;   // aligned with serving(k); empty in fixed mode
    std::vector<int> sinr_constraint;
    int phi = -1;
};

struct PowerGp {
    GpProblem problem;
    PowerGpLayout layout;
    Eigen::VectorXd anchor;
    std::vector<double> objective_weight;   // ψ̂_k / B per user
    std::vector<double> objective_offset;   // B_i δ_k per user
    int negative_terms = 0;                 // cross terms moved to the right-hand side
};

/// SCA subproblem at `anchor`: maximize Π χ^{ψ̂} under the condensed SINR constraints, the rate
/// floors, p <= P^{max} and Σ w² <= 1.
PowerGp build_power_gp(const RateModel& model, const Allocation& anchor, double requirement, WeightMode mode);

/// Feasibility problem: maximize φ with φ(2^{R/B}−1) in place of χ.
PowerGp build_feasibility_gp(const RateModel& model, const Allocation& anchor, double requirement, WeightMode mode);

/// Reads p and w from a GP point; weights are renormalized to Σ w² = 1.
Allocation apply_solution(const RateModel& model, const Allocation& base, const PowerGp& gp, const Eigen::VectorXd& x);

/// Surrogate sum rate Σ B_i (ψ log2 χ + δ) of a GP point.
double surrogate_rate(const PowerGp& gp, const Eigen::VectorXd& x);

struct PowerControlOptions {
    double tolerance = 0.01;
    int max_iterations = 30;
    int feasibility_rounds = 20;
    WeightMode weights = WeightMode::optimize;
    GpOptions gp;
};

struct FeasibilityReport {
    double phi = 0.0;            // min over users of SINR / (2^{R/B}−1); +inf without requirements
    bool feasible = false;
    Allocation allocation;       // maximizer found
    int rounds = 0;
    GpStatus status = GpStatus::optimal;
};

FeasibilityReport feasibility_check(const RateModel& model, const Allocation& allocation, double requirement,
                                    const PowerControlOptions& options = {});

struct PowerControlTraceRow {
    int iteration = 0;
    double sum_rate = 0.0;
    double surrogate = 0.0;
    double kkt_residual = 0.0;
    int newton_steps = 0;
    int negative_terms = 0;
    GpStatus status = GpStatus::optimal;
};

struct PowerControlResult {
    Allocation allocation;
    double sum_rate = 0.0;
    int iterations = 0;
    bool converged = false;
    bool started_from_feasibility_powers = false;
    FeasibilityReport feasibility;
    std::vector<PowerControlTraceRow> trace;
};

/// Successive GP iteration from p = P^{max} and the feasibility weights; stops once the relative
/// sum-rate gain falls below `tolerance`. Throws InfeasibleError when φ < 1.
PowerControlResult optimize_power_weights(const RateModel& model, const Allocation& allocation, double requirement,
                                          const PowerControlOptions& options = {});

}  // namespace dmimo
