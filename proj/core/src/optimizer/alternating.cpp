#include "dmimo/optimizer/alternating.hpp"

#include <cmath>

namespace dmimo {

namespace {

struct Score {
    bool meets = false;
    double rate = 0.0;

    bool at_least(const Score& o) const { return meets != o.meets ? meets : rate >= o.rate; }
};

Score score(const RateModel& model, const Allocation& a, double requirement) {
    Score s;
    const auto rates = model.rates(a);
    s.meets = true;
    for (const auto& g : a.groups) {
        for (int k : g) {
            s.rate += rates[k];
            s.meets = s.meets && rates[k] >= requirement * (1.0 - 1e-9);
        }
    }
    return s;
}

}  // namespace

AlternatingOptions alternating_options(const SystemConfig& config) {
    AlternatingOptions o;
    o.requirement = config.rate_requirement;
    o.num_subbands = config.num_subbands;
    o.capacity = config.subband_capacity;
    return o;
}

AlternatingResult alternating_optimize(const RateModel& model, const ChannelEstimate& estimate,
                                       const AlternatingOptions& options) {
    const auto& sc = model.scenario();
    const int K = sc.num_users();
    Allocation current;
    current.powers.assign(K, sc.config().max_power);
    current.weights = options.initial_weights ? *options.initial_weights : equal_weights(sc);
    Score cur{};
    bool scheduled = false;

    AlternatingResult out;
    const SchedulerOptions sopt{options.num_subbands, options.capacity, options.requirement,
                                options.scheduler_iterations};
    for (int round = 1; round <= options.max_rounds; ++round) {
        AlternatingRound rec;
        rec.round = round;
        const double start = scheduled ? cur.rate : 0.0;

        const Schedule sched = schedule_users(model, estimate, current, sopt);
        Allocation cand = current;
        cand.groups = sched.groups;
        cand.bandwidths = equal_bandwidths(sc, cand.groups.size());
        const Score cs = score(model, cand, options.requirement);
        if (!scheduled || cs.at_least(cur)) {
            current = std::move(cand);
            cur = cs;
            scheduled = true;
        } else {
            rec.notes.push_back("schedule: kept previous grouping");
        }
        if (!sched.feasible) rec.notes.push_back("schedule: no grouping met every rate floor");
        rec.after_schedule = cur.rate;

        try {
            const auto pc = optimize_power_weights(model, current, options.requirement, options.power);
            rec.power_iterations = pc.iterations;
            rec.power_trace = pc.trace;
            const Score ps = score(model, pc.allocation, options.requirement);
            if (ps.at_least(cur)) {
                current = pc.allocation;
                cur = ps;
            } else {
                rec.notes.push_back("power_control: result not kept");
            }
        } catch (const InfeasibleError& e) {
            rec.notes.push_back(e.what());
        }
        rec.after_power = cur.rate;

        try {
            const auto bw = optimize_bandwidth(model, current, options.requirement, options.bandwidth);
            rec.bandwidth_iterations = bw.iterations;
            rec.bandwidth_trace = bw.trace;
            Allocation next = current;
            next.bandwidths = bw.bandwidths;
            const Score bs = score(model, next, options.requirement);
            if (bs.at_least(cur)) {
                current = std::move(next);
                cur = bs;
            } else {
                rec.notes.push_back("bandwidth: result not kept");
            }
        } catch (const InfeasibleError& e) {
            rec.notes.push_back(e.what());
        }
        rec.after_bandwidth = cur.rate;
        out.rounds.push_back(std::move(rec));

        if (cur.rate > 0.0 && (cur.rate - start) / cur.rate < options.outer_tolerance) break;
    }
    out.allocation = current;
    out.sum_rate = cur.rate;
    out.meets_requirements = cur.meets;
    return out;
}

Eigen::MatrixXd estimate_magnitude_weights(const Scenario& scenario, const ChannelEstimate& estimate) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(scenario.num_satellites(), scenario.num_users());
    for (int k = 0; k < scenario.num_users(); ++k) {
        double total = 0.0;
        for (int m : scenario.serving(k)) total += estimate.at(m, k).squaredNorm();
        if (!(total > 0.0)) throw DegenerateError("estimate_magnitude_weights: zero channel estimate");
        for (int m : scenario.serving(k)) w(m, k) = estimate.at(m, k).norm() / std::sqrt(total);
    }
    return w;
}

AlternatingResult benchmark_equal_weights(const RateModel& model, const ChannelEstimate& estimate,
                                          AlternatingOptions options) {
    options.power.weights = WeightMode::fixed;
    options.initial_weights = equal_weights(model.scenario());
    return alternating_optimize(model, estimate, options);
}

AlternatingResult benchmark_estimate_weights(const RateModel& model, const ChannelEstimate& estimate,
                                             AlternatingOptions options) {
    options.power.weights = WeightMode::fixed;
    options.initial_weights = estimate_magnitude_weights(model.scenario(), estimate);
    return alternating_optimize(model, estimate, options);
}

}  // namespace dmimo
