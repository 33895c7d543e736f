#pragma once

#include <vector>

#include "dmimo/rate.hpp"

namespace dmimo {

/// f(x) = x log2(1 + a / (b x + c)): a user's rate as a function of its band's width.
struct RateShape {
    double a = 0.0;  // desired signal power
    double b = 0.0;  // noise power per Hz
    double c = 0.0;  // interference and leakage power

    double value(double x) const;
    double first(double x) const;
    double second(double x) const;
    /// sup f = a / (b ln 2).
    double supremum() const;
    /// Smallest x with f(x) >= rate, by bisection; +inf when rate >= sup f.
    double inverse(double rate) const;
};

/// Shape of user k's bound at the allocation's bandwidth.
RateShape rate_shape(const SinrTerms& terms);

struct BandwidthOptions {
    double kkt_tolerance = 1e-8;
    int max_iterations = 100;
};

struct BandwidthTraceRow {
    int iteration = 0;
    double sum_rate = 0.0;
    double kkt_residual = 0.0;
};

struct BandwidthResult {
    std::vector<double> bandwidths;
    std::vector<double> floors;
    double sum_rate = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
    std::vector<BandwidthTraceRow> trace;
};

/// Maximizes Σ_i Σ_{k in band i} f_k(B_i) s.t. Σ B_i = total and f_k(B_i) >= requirement.
/// Active-set Newton from the equal split; throws InfeasibleError when the floors do not fit.
BandwidthResult solve_bandwidth(const std::vector<std::vector<RateShape>>& bands, double total, double requirement,
                                const BandwidthOptions& options = {});

BandwidthResult optimize_bandwidth(const RateModel& model, const Allocation& allocation, double requirement,
                                   const BandwidthOptions& options = {});

}  // namespace dmimo
