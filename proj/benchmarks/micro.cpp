#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "dmimo/channel.hpp"
#include "dmimo/config.hpp"
#include "dmimo/estimation.hpp"
#include "dmimo/optimizer/bandwidth.hpp"
#include "dmimo/optimizer/power_control.hpp"
#include "dmimo/random.hpp"
#include "dmimo/rate.hpp"
#include "dmimo/scenario.hpp"
#include "dmimo/scheduler.hpp"

namespace {

using namespace dmimo;

SystemConfig config_for(int users, int side) {
    SystemConfig c = default_config();
    c.num_users = users;
    c.pilot_length = std::max(1, users - 2);
    c.antennas_x = side;
    c.antennas_y = side;
    c.num_subbands = 4;
    c.subband_capacity = (users + 3) / 4 + 1;
    return c;
}

std::vector<int> everyone(int k) {
    std::vector<int> v(k);
    for (int i = 0; i < k; ++i) v[i] = i;
    return v;
}

void BM_EstimationTable(benchmark::State& state) {
    Rng rng(1);
    const Scenario s = build_scenario(config_for(8, static_cast<int>(state.range(0))), rng);
    for (auto _ : state) benchmark::DoNotOptimize(EstimationTable(s));
}
BENCHMARK(BM_EstimationTable)->Arg(4)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_RateModel(benchmark::State& state) {
    Rng rng(1);
    const Scenario s = build_scenario(config_for(static_cast<int>(state.range(0)), 4), rng);
    const EstimationTable t(s);
    for (auto _ : state) benchmark::DoNotOptimize(RateModel(s, t));
}
BENCHMARK(BM_RateModel)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_SinrLowerBound(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    Rng rng(1);
    const Scenario s = build_scenario(config_for(k, 4), rng);
    const EstimationTable t(s);
    const RateModel model(s, t);
    const Allocation a = equal_allocation(s, {everyone(k)});
    for (auto _ : state) {
        for (int u = 0; u < k; ++u) benchmark::DoNotOptimize(sinr_lower_bound(model, a, u));
    }
}
BENCHMARK(BM_SinrLowerBound)->Arg(6)->Arg(12);

void BM_ChannelEstimate(benchmark::State& state) {
    Rng rng(1);
    const Scenario s = build_scenario(config_for(8, static_cast<int>(state.range(0))), rng);
    const EstimationTable t(s);
    for (auto _ : state) {
        const auto h = sample_channel(s, rng);
        benchmark::DoNotOptimize(estimate_channels(s, t, observe_pilots(s, h, rng)));
    }
}
BENCHMARK(BM_ChannelEstimate)->Arg(4)->Arg(10)->Unit(benchmark::kMicrosecond);

void BM_Dsatur(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    Rng rng(3);
    std::bernoulli_distribution edge(0.4);
    Adjacency adj = Adjacency::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) adj(i, j) = adj(j, i) = edge(rng);
    }
    for (auto _ : state) benchmark::DoNotOptimize(dsatur_color(adj, (k + 3) / 4));
}
BENCHMARK(BM_Dsatur)->Arg(12)->Arg(64)->Arg(256);

void BM_ScheduleUsers(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const SystemConfig c = config_for(k, 4);
    Rng rng(1);
    const Scenario s = build_scenario(c, rng);
    const EstimationTable t(s);
    const auto est = estimate_channels(s, t, observe_pilots(s, sample_channel(s, rng), rng));
    const RateModel model(s, t);
    const Allocation current = equal_allocation(s, {everyone(k)});
    const SchedulerOptions options{c.num_subbands, c.subband_capacity, c.rate_requirement};
    for (auto _ : state) benchmark::DoNotOptimize(schedule_users(model, est, current, options));
}
BENCHMARK(BM_ScheduleUsers)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_PowerGpSolve(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    Rng rng(1);
    const Scenario s = build_scenario(config_for(k, 4), rng);
    const EstimationTable t(s);
    const RateModel model(s, t);
    const Allocation a = equal_allocation(s, {everyone(k)});
    const PowerGp gp = build_power_gp(model, a, 0.0, WeightMode::optimize);
    for (auto _ : state) benchmark::DoNotOptimize(solve_gp(gp.problem, &gp.anchor));
    state.counters["variables"] = gp.problem.num_variables();
}
BENCHMARK(BM_PowerGpSolve)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_SolveBandwidth(benchmark::State& state) {
    const int bands = static_cast<int>(state.range(0));
    Rng rng(9);
    std::uniform_real_distribution<double> lg(-2.0, 2.0);
    std::vector<std::vector<RateShape>> shapes(bands);
    for (auto& b : shapes) {
        for (int u = 0; u < 3; ++u) b.push_back({std::pow(10.0, lg(rng)), std::pow(10.0, lg(rng)), std::pow(10.0, lg(rng))});
    }
    for (auto _ : state) benchmark::DoNotOptimize(solve_bandwidth(shapes, 4.0, 0.0));
}
BENCHMARK(BM_SolveBandwidth)->Arg(4)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
