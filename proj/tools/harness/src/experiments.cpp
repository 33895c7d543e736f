#include "dmimo/harness/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <span>

#include "dmimo/channel.hpp"
#include "dmimo/estimation.hpp"
#include "dmimo/parallel.hpp"
#include "dmimo/random.hpp"
#include "dmimo/scenario.hpp"
#include "dmimo/scheduler.hpp"

namespace dmimo::harness {

namespace {

constexpr Experiment kAll[] = {Experiment::nmse_sweep, Experiment::bound_validate, Experiment::schedule_compare,
                               Experiment::convergence, Experiment::benchmark};

McEstimate summarize(std::span<const double> v) {
    const double n = static_cast<double>(v.size());
    McEstimate e;
    e.mean = pairwise_sum(v) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - e.mean) * (x - e.mean);
    e.se = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    return e;
}

double mean_of(std::span<const double> v) { return pairwise_sum(v) / static_cast<double>(v.size()); }

std::vector<int> everyone(int k) {
    std::vector<int> g(k);
    for (int i = 0; i < k; ++i) g[i] = i;
    return g;
}

int default_capacity(int users, int subbands) { return (users + subbands - 1) / subbands + 1; }

SystemConfig scaled(SystemConfig c, bool paper_scale) {
    if (paper_scale) {
        c.antennas_x = 10;
        c.antennas_y = 10;
    }
    return c;
}

std::vector<double> grid_or(const ExperimentSpec& spec, std::vector<double> fallback) {
    return spec.grid.empty() ? std::move(fallback) : spec.grid;
}

std::vector<int> int_grid(const std::vector<double>& g) {
    std::vector<int> out;
    for (double v : g) {
        if (v != std::floor(v) || v < 1) throw ConfigError("grid: expected positive integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

}  // namespace

std::string_view to_string(Experiment e) {
    switch (e) {
        case Experiment::nmse_sweep: return "nmse-sweep";
        case Experiment::bound_validate: return "bound-validate";
        case Experiment::schedule_compare: return "schedule-compare";
        case Experiment::convergence: return "convergence";
        case Experiment::benchmark: return "benchmark";
    }
    return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
    for (auto e : kAll) {
        if (to_string(e) == name) return e;
    }
    return std::nullopt;
}

std::vector<std::string> experiment_names() {
    std::vector<std::string> out;
    for (auto e : kAll) out.emplace_back(to_string(e));
    return out;
}

void ExperimentSpec::validate() const {
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw ConfigError("grid must be strictly increasing");
    }
    config.validate();
}

std::uint64_t instance_seed(std::uint64_t run_seed, std::uint64_t index) { return mix_seed(run_seed, index); }

Instance draw_instance(const SystemConfig& config, std::uint64_t seed) {
    Rng rng(seed);
    Scenario s = build_scenario(config, rng);
    EstimationTable t(s);
    const auto h = sample_channel(s, rng);
    auto est = estimate_channels(s, t, observe_pilots(s, h, rng));
    return {std::move(s), std::move(t), std::move(est)};
}

// nmse-sweep

std::vector<NmsePoint> nmse_sweep(const SystemConfig& config, const std::vector<double>& grid, std::size_t trials,
                                  std::uint64_t seed) {
    if (trials < 2) throw ConfigError("nmse_sweep: need at least two trials");
    Rng rng(instance_seed(seed, 0));
    const Scenario base = build_scenario(config, rng);
    const int M = base.num_satellites();
    const int K = base.num_users();
    const double links = static_cast<double>(M) * K;
    const std::uint64_t mc_seed = instance_seed(seed, 1);

    std::vector<NmsePoint> out;
    for (double kbar : grid) {
        const Scenario s = base.with_rician(kbar);
        const EstimationTable table(s);
        NmsePoint p;
        p.rician = kbar;
        for (int m = 0; m < M; ++m) {
            for (int k = 0; k < K; ++k) {
                p.mse += table.mse(m, k) / links;
                p.nmse += table.nmse(m, k) / links;
            }
        }
        struct Draw {
            double mse = 0.0;
            double nmse = 0.0;
        };
        const auto draws = parallel_map<Draw>(trials, [&](std::size_t t) {
            Rng r = child_stream(mc_seed, t);
            const auto h = sample_channel(s, r);
            const auto est = estimate_channels(s, table, observe_pilots(s, h, r));
            Draw d;
            for (int m = 0; m < M; ++m) {
                for (int k = 0; k < K; ++k) {
                    const double e = (h.at(m, k) - est.at(m, k)).squaredNorm();
                    d.mse += e / links;
                    d.nmse += e / table.at(m, k).r.trace().real() / links;
                }
            }
            return d;
        });
        std::vector<double> col(trials);
        for (std::size_t t = 0; t < trials; ++t) col[t] = draws[t].mse;
        p.mse_mc = summarize(col);
        for (std::size_t t = 0; t < trials; ++t) col[t] = draws[t].nmse;
        p.nmse_mc = summarize(col);
        out.push_back(p);
    }
    return out;
}

ExperimentOutput run_nmse_sweep(const ExperimentSpec& spec) {
    const auto grid = grid_or(spec, {0.1, 0.5, 1, 2, 5, 10, 20, 50, 100, 1000, 10000});
    const std::size_t trials = spec.trials_or(10000);
    const auto config = scaled(spec.config, spec.paper_scale);
    const auto pts = nmse_sweep(config, grid, trials, spec.seed);

    ExperimentOutput out;
    Table t;
    t.columns = {"rician", "trials", "mse_closed", "mse_mc", "mse_se", "nmse_closed", "nmse_mc", "nmse_se"};
    for (const auto& p : pts) {
        t.add(spec.seed, {p.rician, trials, p.mse, p.mse_mc.mean, p.mse_mc.se, p.nmse, p.nmse_mc.mean, p.nmse_mc.se});
    }
    out.tables.push_back(std::move(t));
    out.plots.push_back({"Estimation MSE", "rician", {"mse_closed", "mse_mc"}, "Rician factor", "MSE", true, "", {}, {}});
    out.plots.push_back(
        {"Estimation NMSE", "rician", {"nmse_closed", "nmse_mc"}, "Rician factor", "NMSE", true, "", {}, {}});
    out.summary = {{"trials", trials}, {"grid", grid}, {"users", config.num_users}, {"pilot_length", config.pilot_length}};
    return out;
}

// bound-validate

Eigen::MatrixXd random_weights(const Scenario& scenario, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(scenario.num_satellites(), scenario.num_users());
    for (int k = 0; k < scenario.num_users(); ++k) {
        for (int m : scenario.serving(k)) w(m, k) = 1.0 - u(rng);
    }
    normalize_weights(scenario, w);
    return w;
}

std::vector<BoundPoint> bound_validation(const SystemConfig& config, const std::vector<double>& grid,
                                         std::size_t trials, std::uint64_t seed) {
    Rng rng(instance_seed(seed, 0));
    const Scenario base = build_scenario(config, rng);
    const int K = base.num_users();
    const std::uint64_t mc_seed = instance_seed(seed, 1);
    const Eigen::MatrixXd weights = random_weights(base, instance_seed(seed, 2));
    std::vector<BoundPoint> out;
    for (double kbar : grid) {
        const Scenario s = base.with_rician(kbar);
        const EstimationTable table(s);
        const RateModel model(s, table);
        Allocation a = equal_allocation(s, {everyone(K)});
        a.weights = weights;
        const auto mc = monte_carlo_terms(s, table, a, trials, mc_seed);
        BoundPoint p;
        p.rician = kbar;
        p.rate_lb = model.rates(a);
        for (const auto& u : mc.users) {
            p.ergodic.push_back(u.ergodic_rate);
            p.bound_form.push_back(u.bound_form_rate);
            p.sum_bound_form += u.bound_form_rate;
        }
        p.sum_lb = pairwise_sum(std::span<const double>(p.rate_lb));
        p.sum_ergodic = mc.sum_ergodic_rate;
        out.push_back(std::move(p));
    }
    return out;
}

SystemConfig bound_setup(SystemConfig c) {
    c.num_users = 5;
    c.pilot_length = 3;
    c.cluster_size = 2;
    c.num_subbands = 1;
    c.subband_capacity = 5;
    return c;
}

ExperimentOutput run_bound_validation(const ExperimentSpec& spec) {
    const auto grid = grid_or(spec, {1, 5, 10, 20, 50, 100});
    const std::size_t trials = spec.trials_or(10000);
    const auto config = bound_setup(scaled(spec.config, spec.paper_scale));
    const auto pts = bound_validation(config, grid, trials, spec.seed);

    ExperimentOutput out;
    Table t;
    t.columns = {"rician", "user", "trials", "rate_lb", "ergodic_mc", "ergodic_se", "bound_form_mc", "relative_gap"};
    for (const auto& p : pts) {
        for (std::size_t k = 0; k < p.rate_lb.size(); ++k) {
            const auto& e = p.ergodic[k];
            t.add(spec.seed, {p.rician, std::to_string(k), trials, p.rate_lb[k], e.mean, e.se, p.bound_form[k],
                              (e.mean - p.rate_lb[k]) / e.mean});
        }
        t.add(spec.seed, {p.rician, "all", trials, p.sum_lb, p.sum_ergodic.mean, p.sum_ergodic.se, p.sum_bound_form,
                          (p.sum_ergodic.mean - p.sum_lb) / p.sum_ergodic.mean});
    }
    out.tables.push_back(std::move(t));
    out.plots.push_back({"Sum rate: closed form vs Monte Carlo", "rician", {"rate_lb", "ergodic_mc", "bound_form_mc"},
                         "Rician factor", "bit/s", true, "", {}, {{"user", "all"}}});
    out.summary = {{"trials", trials}, {"grid", grid}, {"users", config.num_users}, {"pilot_length", config.pilot_length},
                   {"cluster_size", config.cluster_size}};
    return out;
}

// schedule-compare

SystemConfig schedule_setup(SystemConfig c, int users, int subbands, int capacity) {
    c.num_users = users;
    c.num_subbands = subbands;
    c.subband_capacity = capacity;
    c.pilot_length = users - 1;
    c.cluster_size = 3;
    return c;
}

ScheduleComparison compare_schedules(const SystemConfig& config, std::uint64_t seed) {
    using clock = std::chrono::steady_clock;
    const Instance inst = draw_instance(config, seed);
    const RateModel model(inst.scenario, inst.table);
    const int K = config.num_users;
    const Allocation current = equal_allocation(inst.scenario, {everyone(K)});
    const SchedulerOptions opt{config.num_subbands, config.subband_capacity, config.rate_requirement, 100};

    ScheduleComparison c;
    c.users = K;
    auto t0 = clock::now();
    const Schedule alg = schedule_users(model, inst.estimate, current, opt);
    auto t1 = clock::now();
    const Schedule ex = exhaustive_schedule(model, current, opt);
    auto t2 = clock::now();
    c.algorithm1 = alg.sum_rate;
    c.algorithm1_feasible = alg.feasible;
    c.violation = schedule_violation(alg.groups, K, opt.num_subbands, opt.capacity);
    c.exhaustive = ex.sum_rate;
    c.all_share = all_share_sum_rate(model, current);
    c.partitions = count_partitions(K, opt.num_subbands, opt.capacity);
    c.seconds_algorithm1 = std::chrono::duration<double>(t1 - t0).count();
    c.seconds_exhaustive = std::chrono::duration<double>(t2 - t1).count();
    return c;
}

ExperimentOutput run_schedule_compare(const ExperimentSpec& spec) {
    const auto users = int_grid(grid_or(spec, {5, 6, 7, 8}));
    const std::size_t trials = spec.trials_or(10);
    constexpr int kSubbands = 4;

    ExperimentOutput out;
    Table t;
    t.columns = {"users",        "instances",          "algorithm1",  "exhaustive", "all_share",
                 "ratio_mean",   "ratio_min",          "valid",       "partitions"};
    Table timing;
    timing.suffix = "timing";
    timing.reproducible = false;
    timing.columns = {"users", "instances", "algorithm1_seconds", "exhaustive_seconds", "partitions"};
    for (int K : users) {
        if (K > 10) throw ConfigError("schedule-compare: exhaustive arm needs K <= 10");
        const auto config = schedule_setup(scaled(spec.config, spec.paper_scale), K, kSubbands,
                                           default_capacity(K, kSubbands));
        std::vector<double> alg, ex, share, ratio, s_alg, s_ex;
        int valid = 0;
        long partitions = 0;
        for (std::size_t i = 0; i < trials; ++i) {
            // sequential on purpose: the timing columns compare the two arms
            const auto c = compare_schedules(config, instance_seed(spec.seed, static_cast<std::uint64_t>(K) * 1000003u + i));
            alg.push_back(c.algorithm1);
            ex.push_back(c.exhaustive);
            share.push_back(c.all_share);
            ratio.push_back(c.exhaustive > 0 ? c.algorithm1 / c.exhaustive : 1.0);
            s_alg.push_back(c.seconds_algorithm1);
            s_ex.push_back(c.seconds_exhaustive);
            valid += c.violation.empty();
            partitions = c.partitions;
        }
        t.add(spec.seed, {K, trials, mean_of(alg), mean_of(ex), mean_of(share), mean_of(ratio),
                          *std::min_element(ratio.begin(), ratio.end()), valid, partitions});
        timing.add(spec.seed, {K, trials, mean_of(s_alg), mean_of(s_ex), partitions});
    }
    out.tables.push_back(std::move(t));
    out.tables.push_back(std::move(timing));
    out.plots.push_back({"Scheduling: Algorithm 1 vs exhaustive search", "users",
                         {"algorithm1", "exhaustive", "all_share"}, "users K", "sum rate (bit/s)", false, "", {}, {}});
    out.summary = {{"trials", trials}, {"users", users}, {"subbands", kSubbands}};
    return out;
}

// convergence

SystemConfig convergence_setup(SystemConfig c, int antennas_x, int antennas_y) {
    c.num_users = 8;
    c.num_satellites = 4;
    c.cluster_size = 3;
    c.num_subbands = 4;
    c.subband_capacity = default_capacity(8, 4);
    c.pilot_length = 6;
    c.antennas_x = antennas_x;
    c.antennas_y = antennas_y;
    if (c.satellite_elevation_offsets.size() != 4) c.satellite_elevation_offsets.clear();
    return c;
}

ConvergenceRun convergence_run(const SystemConfig& config, std::uint64_t seed) {
    const Instance inst = draw_instance(config, seed);
    const RateModel model(inst.scenario, inst.table);
    ConvergenceRun r;
    r.antennas = config.num_antennas();
    r.result = alternating_optimize(model, inst.estimate, alternating_options(config));
    return r;
}

ExperimentOutput run_convergence(const ExperimentSpec& spec) {
    const std::vector<std::pair<int, int>> arrays = {{8, 8}, {10, 10}};
    const auto runs = parallel_map<ConvergenceRun>(arrays.size(), [&](std::size_t i) {
        return convergence_run(convergence_setup(spec.config, arrays[i].first, arrays[i].second),
                               instance_seed(spec.seed, 0));
    });

    ExperimentOutput out;
    Table t;
    t.columns = {"antennas", "stage", "round", "iteration", "sum_rate", "kkt_residual", "status"};
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& run : runs) {
        for (const auto& rd : run.result.rounds) {
            for (const auto& row : rd.power_trace) {
                t.add(spec.seed, {run.antennas, "power", rd.round, row.iteration, row.sum_rate, row.kkt_residual,
                                  std::string(to_string(row.status))});
            }
            for (const auto& row : rd.bandwidth_trace) {
                t.add(spec.seed, {run.antennas, "bandwidth", rd.round, row.iteration, row.sum_rate, row.kkt_residual, ""});
            }
            t.add(spec.seed, {run.antennas, "outer", rd.round, rd.round, rd.after_bandwidth, 0.0, ""});
        }
        summary.push_back({{"antennas", run.antennas},
                           {"sum_rate", run.result.sum_rate},
                           {"rounds", run.result.rounds.size()},
                           {"meets_requirements", run.result.meets_requirements}});
    }
    out.tables.push_back(std::move(t));
    for (const auto& run : runs) {
        const std::string n = std::to_string(run.antennas);
        out.plots.push_back({"Convergence, N = " + n, "iteration", {"sum_rate"}, "iteration", "sum rate (bit/s)", false,
                             "stage", {"power", "bandwidth", "outer"}, {{"antennas", n}}});
    }
    out.summary = {{"runs", summary}};
    return out;
}

// benchmark

SystemConfig benchmark_setup(SystemConfig c, int users) {
    c.num_users = users;
    c.num_subbands = 4;
    c.subband_capacity = default_capacity(users, 4);
    c.pilot_length = users - 2;
    c.max_power = 0.2;
    c.cluster_size = 3;
    c.pilot_scheme = PilotScheme::uniform;
    return c;
}

BenchmarkSample benchmark_instance(const SystemConfig& config, std::uint64_t seed) {
    const Instance inst = draw_instance(config, seed);
    const RateModel model(inst.scenario, inst.table);
    const auto opt = alternating_options(config);
    BenchmarkSample s;
    const auto proposed = alternating_optimize(model, inst.estimate, opt);
    s.proposed = proposed.sum_rate;
    s.proposed_meets = proposed.meets_requirements;
    s.equal_weights = benchmark_equal_weights(model, inst.estimate, opt).sum_rate;
    s.estimate_weights = benchmark_estimate_weights(model, inst.estimate, opt).sum_rate;
    return s;
}

ExperimentOutput run_benchmark(const ExperimentSpec& spec) {
    const auto users = int_grid(grid_or(spec, {6, 8, 10, 12}));
    const std::size_t trials = spec.trials_or(100);

    ExperimentOutput out;
    Table t;
    t.columns = {"users",           "seeds",         "proposed",          "proposed_se",  "equal_weights",
                 "equal_weights_se", "estimate_weights", "estimate_weights_se", "proposed_per_user", "meets_fraction"};
    for (int K : users) {
        const auto config = benchmark_setup(scaled(spec.config, spec.paper_scale), K);
        const auto samples = parallel_map<BenchmarkSample>(
            trials, [&](std::size_t i) { return benchmark_instance(config, instance_seed(spec.seed, i)); });
        std::vector<double> p(trials), b1(trials), b2(trials);
        double meets = 0.0;
        for (std::size_t i = 0; i < trials; ++i) {
            p[i] = samples[i].proposed;
            b1[i] = samples[i].equal_weights;
            b2[i] = samples[i].estimate_weights;
            meets += samples[i].proposed_meets;
        }
        const auto sp = summarize(p), s1 = summarize(b1), s2 = summarize(b2);
        t.add(spec.seed, {K, trials, sp.mean, sp.se, s1.mean, s1.se, s2.mean, s2.se, sp.mean / K,
                          meets / static_cast<double>(trials)});
    }
    out.tables.push_back(std::move(t));
    out.plots.push_back({"Sum rate vs number of users", "users", {"proposed", "equal_weights", "estimate_weights"},
                         "users K", "sum rate (bit/s)", false, "", {}, {}});
    out.summary = {{"trials", trials}, {"users", users}};
    return out;
}

ExperimentOutput run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    switch (spec.experiment) {
        case Experiment::nmse_sweep: return run_nmse_sweep(spec);
        case Experiment::bound_validate: return run_bound_validation(spec);
        case Experiment::schedule_compare: return run_schedule_compare(spec);
        case Experiment::convergence: return run_convergence(spec);
        case Experiment::benchmark: return run_benchmark(spec);
    }
    throw ContractError("run_experiment: unknown experiment");
}

}  // namespace dmimo::harness
