#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmimo/estimation.hpp"
#include "dmimo/rate.hpp"
#include "dmimo/scenario.hpp"

namespace dmimo {

using Adjacency = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// ρ between users k and j: the two normalized cross-correlations, numerators taken in modulus.
double correlation_factor(const Scenario& scenario, const ChannelEstimate& estimate, int k, int j);

/// Symmetric K x K matrix of ρ with zero diagonal.
Eigen::MatrixXd correlation_factors(const Scenario& scenario, const ChannelEstimate& estimate);

/// B[k][j] = 1 iff ρ[k][j] >= threshold and ρ[k][j] > 0 (k != j).
Adjacency threshold_graph(const Eigen::MatrixXd& rho, double threshold);

struct Coloring {
    std::vector<int> color;  // per vertex, 0-based
    int num_colors = 0;

    std::vector<std::vector<int>> classes() const;
};

/// Capacity-aware DSatur. Next vertex: highest saturation, then highest degree, then lowest index.
/// A color is admissible when no neighbour holds it and it has fewer than `capacity` members;
/// the lowest admissible color is used, opening a new one when none is admissible.
Coloring dsatur_color(const Adjacency& adjacency, int capacity);

/// Returns an empty string when the groups form a valid schedule, otherwise the first violation.
std::string schedule_violation(const std::vector<std::vector<int>>& groups, int num_users, int num_subbands,
                               int capacity);

/// Conflict-free check: no two adjacent vertices share a color.
bool is_proper_coloring(const Adjacency& adjacency, const std::vector<int>& color);

struct Schedule {
    std::vector<std::vector<int>> groups;  // non-empty bands only
    int colors_used = 0;
    bool feasible = false;
    double sum_rate = 0.0;
    int iterations = 0;
};

struct ScheduleEvaluation {
    double sum_rate = 0.0;
    double min_rate = 0.0;
    bool meets_requirements = false;
    std::vector<double> rates;
};

/// Sum rate of a grouping with equal bandwidth over its non-empty bands and the given powers/weights.
ScheduleEvaluation evaluate_schedule(const RateModel& model, const std::vector<std::vector<int>>& groups,
                                     const Allocation& current, double requirement);

struct SchedulerOptions {
    int num_subbands = 2;
    int capacity = 1;
    double requirement = 0.0;
    int max_iterations = 100;
};

/// Threshold/requirement iteration over DSatur colorings; keeps the best feasible schedule.
Schedule schedule_users(const RateModel& model, const ChannelEstimate& estimate, const Allocation& current,
                        const SchedulerOptions& options);

/// Every partition into at most I blocks of size at most N_max, in restricted-growth order. K <= 10.
Schedule exhaustive_schedule(const RateModel& model, const Allocation& current, const SchedulerOptions& options);

/// Number of partitions exhaustive_schedule visits.
long count_partitions(int num_users, int num_subbands, int capacity);

/// Everyone in one band with the full bandwidth B.
double all_share_sum_rate(const RateModel& model, const Allocation& current);

}  // namespace dmimo
