#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dmimo/optimizer/bandwidth.hpp"
#include "dmimo/optimizer/power_control.hpp"
#include "dmimo/scheduler.hpp"

namespace dmimo {

struct AlternatingOptions {
    double requirement = 0.0;
    double outer_tolerance = 1e-3;
    int max_rounds = 20;
    int num_subbands = 2;
    int capacity = 1;
    int scheduler_iterations = 100;
    PowerControlOptions power;
    BandwidthOptions bandwidth;
    std::optional<Eigen::MatrixXd> initial_weights;  // equal weights when absent
};

/// Options from a config: requirement, I, N_max.
AlternatingOptions alternating_options(const SystemConfig& config);

struct AlternatingRound {
    int round = 0;
    double after_schedule = 0.0;
    double after_power = 0.0;
    double after_bandwidth = 0.0;
    int power_iterations = 0;
    int bandwidth_iterations = 0;
    std::vector<PowerControlTraceRow> power_trace;
    std::vector<BandwidthTraceRow> bandwidth_trace;
    std::vector<std::string> notes;  // "<stage>: <reason>" for rejected or failed stages
};

struct AlternatingResult {
    Allocation allocation;
    double sum_rate = 0.0;
    bool meets_requirements = false;
    std::vector<AlternatingRound> rounds;
};

/// Scheduling, power/weight control and bandwidth in turn; a stage's output is kept only when it
/// does not lower the sum rate (a result meeting every rate floor always beats one that does not).
AlternatingResult alternating_optimize(const RateModel& model, const ChannelEstimate& estimate,
                                       const AlternatingOptions& options);

/// w = ||ĥ_{m,k}|| / sqrt(Σ_m ||ĥ_{m,k}||²) on each serving set.
Eigen::MatrixXd estimate_magnitude_weights(const Scenario& scenario, const ChannelEstimate& estimate);

/// Same loop with weights frozen at 1/sqrt(|M_k|).
AlternatingResult benchmark_equal_weights(const RateModel& model, const ChannelEstimate& estimate,
                                          AlternatingOptions options);

/// Same loop with weights frozen at the estimate magnitudes.
AlternatingResult benchmark_estimate_weights(const RateModel& model, const ChannelEstimate& estimate,
                                             AlternatingOptions options);

}  // namespace dmimo
