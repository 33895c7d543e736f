#include <algorithm>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "dmimo/scheduler.hpp"
#include "fixtures.hpp"

using namespace dmimo;

namespace {

Adjacency random_graph(int n, double p, Rng& rng) {
    std::bernoulli_distribution edge(p);
    Adjacency a = Adjacency::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (edge(rng)) a(i, j) = a(j, i) = 1;
        }
    }
    return a;
}

int max_degree(const Adjacency& a) {
    int best = 0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        int d = 0;
        for (Eigen::Index j = 0; j < a.cols(); ++j) d += a(i, j);
        best = std::max(best, d);
    }
    return best;
}

ChannelEstimate clone_estimates(const Scenario& s) {
    ChannelEstimate e;
    e.num_users = s.num_users();
    for (int m = 0; m < s.num_satellites(); ++m) {
        for (int k = 0; k < s.num_users(); ++k) e.h_hat.push_back(s.link(m, 0).los);
    }
    return e;
}

struct Instance {
    Scenario scenario;
    EstimationTable table;
    ChannelEstimate estimate;
};

Instance make_instance(int K, int tau, std::uint64_t seed) {
    auto c = default_config();
    c.num_users = K;
    c.pilot_length = tau;
    c.cluster_size = 3;
    c.num_subbands = 2;
    c.subband_capacity = K;
    c.rng_seed = seed;
    Rng rng(seed);
    auto s = build_scenario(c, rng);
    EstimationTable t(s);
    const auto h = sample_channel(s, rng);
    auto est = estimate_channels(s, t, observe_pilots(s, h, rng));
    return {std::move(s), std::move(t), std::move(est)};
}

}  // namespace

TEST(CorrelationFactor, ClonesOrthogonalAndSymmetric) {
    auto c = test::small_config(2, 2, 2, 2);
    const auto s = test::synthetic_scenario(c, 1.0, 1.0, {0, 1});
    ChannelEstimate e;
    e.num_users = 2;
    CVector a(2), b(2);
    a << cplx(1, 0), cplx(0, 1);
    b << cplx(0, 1), cplx(1, 0);  // a^H b = 0
    e.h_hat = {a, a, a, a};
    EXPECT_NEAR(correlation_factor(s, e, 0, 1), 2.0, 1e-15);
    e.h_hat = {a, b, a, b};
    EXPECT_NEAR(correlation_factor(s, e, 0, 1), 0.0, 1e-15);
    e.h_hat = {a, CVector::Zero(2), a, CVector::Zero(2)};
    EXPECT_THROW(correlation_factor(s, e, 1, 0), DegenerateError);
}

TEST(CorrelationFactor, SymmetricOnRandomInstances) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto inst = make_instance(6, 3, seed);
        const auto rho = correlation_factors(inst.scenario, inst.estimate);
        for (int k = 0; k < 6; ++k) {
            EXPECT_EQ(rho(k, k), 0.0);
            for (int j = 0; j < 6; ++j) EXPECT_NEAR(rho(k, j), rho(j, k), 1e-12);
        }
    }
}

TEST(Dsatur, PathAndComplete) {
    Adjacency path = Adjacency::Zero(3, 3);
    path(0, 1) = path(1, 0) = path(1, 2) = path(2, 1) = 1;
    EXPECT_EQ(dsatur_color(path, 3).num_colors, 2);
    Adjacency k4 = Adjacency::Ones(4, 4);
    for (int i = 0; i < 4; ++i) k4(i, i) = 0;
    EXPECT_EQ(dsatur_color(k4, 4).num_colors, 4);
}

TEST(Dsatur, EmptyGraphPacksToCapacity) {
    const auto c = dsatur_color(Adjacency::Zero(7, 7), 3);
    EXPECT_EQ(c.num_colors, 3);
    for (const auto& cls : c.classes()) EXPECT_LE(cls.size(), 3u);
    EXPECT_EQ(dsatur_color(Adjacency::Zero(5, 5), 5).num_colors, 1);
}

TEST(Dsatur, RandomGraphsProperAndBounded) {
    Rng rng(2024);
    for (int t = 0; t < 200; ++t) {
        const Adjacency g = random_graph(8, 0.4, rng);
        const auto c = dsatur_color(g, 8);
        EXPECT_TRUE(is_proper_coloring(g, c.color));
        EXPECT_LE(c.num_colors, max_degree(g) + 1);
        for (int cap : {1, 2, 3}) {
            const auto cc = dsatur_color(g, cap);
            EXPECT_TRUE(is_proper_coloring(g, cc.color));
            for (const auto& cls : cc.classes()) EXPECT_LE(static_cast<int>(cls.size()), cap);
            EXPECT_LE(cc.num_colors, max_degree(g) + 1 + (8 - 1) / cap);
        }
    }
}

TEST(Dsatur, AddingEdgeOnEmptyOrCompleteNeverHelps) {
    Rng rng(77);
    int decreases = 0;
    for (int t = 0; t < 300; ++t) {
        Adjacency g = random_graph(9, 0.3, rng);
        const int before = dsatur_color(g, 9).num_colors;
        std::uniform_int_distribution<int> v(0, 8);
        int a = v(rng), b = v(rng);
        if (a == b || g(a, b)) continue;
        g(a, b) = g(b, a) = 1;
        if (dsatur_color(g, 9).num_colors < before) ++decreases;
    }
    // Greedy heuristic: monotonicity is not a theorem, but it should be rare.
    EXPECT_LE(decreases, 15);
}

TEST(ScheduleValidator, CatchesEachViolation) {
    EXPECT_EQ(schedule_violation({{0, 1}, {2}}, 3, 2, 2), "");
    EXPECT_NE(schedule_violation({{0, 1, 2}}, 3, 2, 2), "");
    EXPECT_NE(schedule_violation({{0, 1}, {1, 2}}, 3, 2, 2), "");
    EXPECT_NE(schedule_violation({{0}, {1}, {2}}, 3, 2, 2), "");
    EXPECT_NE(schedule_violation({{0, 1}}, 3, 2, 2), "");
    EXPECT_EQ(schedule_violation({{0, 1}, {}, {2}}, 3, 2, 2), "");
}

TEST(PartitionCount, MatchesCombinatorics) {
    EXPECT_EQ(count_partitions(4, 2, 2), 3);
    EXPECT_EQ(count_partitions(4, 4, 4), 15);  // Bell(4)
    EXPECT_EQ(count_partitions(5, 2, 5), 16);  // S(5,1) + S(5,2)
    EXPECT_EQ(count_partitions(6, 3, 2), 15);  // perfect matchings of 6
}

TEST(Algorithm1, NoConflictsFitsOneBand) {
    auto c = test::small_config(1, 4, 4, 4);
    const auto s = test::synthetic_scenario(c, 1e-14, 1.0, {0, 1, 2, 3});
    const EstimationTable table(s);
    const RateModel model(s, table);
    ChannelEstimate e;
    e.num_users = 4;
    for (int k = 0; k < 4; ++k) e.h_hat.push_back(CVector::Unit(4, k));
    const auto cur = equal_allocation(s, {{0, 1, 2, 3}});
    const auto sched = schedule_users(model, e, cur, {.num_subbands = 2, .capacity = 4, .requirement = 0.0});
    EXPECT_TRUE(sched.feasible);
    EXPECT_EQ(sched.colors_used, 1);
    EXPECT_EQ(sched.groups.size(), 1u);
}

TEST(Algorithm1, CompleteConflictIsInfeasible) {
    auto c = test::small_config(1, 4, 4, 4);
    const auto s = test::synthetic_scenario(c, 1e-14, 1.0, {0, 1, 2, 3});
    const EstimationTable table(s);
    const RateModel model(s, table);
    const auto cur = equal_allocation(s, {{0, 1, 2, 3}});
    const auto sched = schedule_users(model, clone_estimates(s), cur, {.num_subbands = 2, .capacity = 4});
    EXPECT_FALSE(sched.feasible);
    EXPECT_EQ(sched.iterations, 100);
    EXPECT_EQ(schedule_violation(sched.groups, 4, 2, 4), "");
}

TEST(Algorithm1, BetweenBaselineAndExhaustive) {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto inst = make_instance(6, 3, seed);
        const RateModel model(inst.scenario, inst.table);
        const auto cur = equal_allocation(inst.scenario, {{0, 1, 2, 3, 4, 5}});
        const SchedulerOptions opt{.num_subbands = 3, .capacity = 2, .requirement = 1e4};
        const auto alg = schedule_users(model, inst.estimate, cur, opt);
        const auto ex = exhaustive_schedule(model, cur, opt);
        EXPECT_EQ(schedule_violation(alg.groups, 6, 3, 2), "");
        EXPECT_EQ(schedule_violation(ex.groups, 6, 3, 2), "");
        EXPECT_TRUE(ex.feasible);
        EXPECT_LE(alg.sum_rate, ex.sum_rate * (1.0 + 1e-12));
        const auto rho = correlation_factors(inst.scenario, inst.estimate);
        const auto first = dsatur_color(threshold_graph(rho, rho.sum() / 30.0), 2);
        if (first.num_colors <= 3) {
            const auto e0 = evaluate_schedule(model, first.classes(), cur, opt.requirement);
            if (e0.meets_requirements) EXPECT_GE(alg.sum_rate, e0.sum_rate);
        }
        if (alg.feasible) EXPECT_GE(evaluate_schedule(model, alg.groups, cur, 0.0).min_rate, opt.requirement);
        EXPECT_NEAR(evaluate_schedule(model, alg.groups, cur, 0.0).sum_rate, alg.sum_rate, 1e-9 * alg.sum_rate);
    }
}

TEST(Exhaustive, ClonesAreSeparated) {
    auto c = test::small_config(1, 2, 4, 1);
    auto corr = std::make_shared<const Correlation>(correlation_matrix(CorrelationModel::identity, 4, 0.0));
    const auto l = make_link(1e-13, kRicianCap, 0.7, 0.3, 1e6, c, corr);
    const Scenario s(c, {l, l}, PilotAssignment::from_indices({0, 0}, 1), {{0}, {0}});
    const EstimationTable table(s);
    const RateModel model(s, table);
    const auto cur = equal_allocation(s, {{0, 1}});
    const auto ex = exhaustive_schedule(model, cur, {.num_subbands = 2, .capacity = 2});
    EXPECT_EQ(ex.groups.size(), 2u);
}

TEST(Exhaustive, OrthogonalUsersTwoCaseEnumeration) {
    auto c = test::small_config(1, 2, 2, 2);
    auto corr = std::make_shared<const Correlation>(correlation_matrix(CorrelationModel::identity, 2, 0.0));
    auto l0 = make_link(1e-13, kRicianCap, 1.0, 0.0, 1e6, c, corr);
    auto l1 = l0;
    l0.los << cplx(1, 0), cplx(1, 0);
    l1.los << cplx(1, 0), cplx(-1, 0);
    const Scenario s(c, {l0, l1}, PilotAssignment::from_indices({0, 1}, 2), {{0}, {0}});
    const EstimationTable table(s);
    const RateModel model(s, table);
    const auto cur = equal_allocation(s, {{0, 1}});
    const double together = evaluate_schedule(model, {{0, 1}}, cur, 0.0).sum_rate;
    const double apart = evaluate_schedule(model, {{0}, {1}}, cur, 0.0).sum_rate;
    const auto ex = exhaustive_schedule(model, cur, {.num_subbands = 2, .capacity = 2});
    EXPECT_NEAR(ex.sum_rate, std::max(together, apart), 1e-9 * ex.sum_rate);
    EXPECT_EQ(ex.groups.size(), together >= apart ? 1u : 2u);
    EXPECT_GT(together, apart);  // no interference, so the full band wins
}

TEST(Exhaustive, RefusesLargeInstances) {
    const auto inst = make_instance(11, 3, 1);
    const RateModel model(inst.scenario, inst.table);
    const auto cur = equal_allocation(inst.scenario, {{0}});
    EXPECT_THROW(exhaustive_schedule(model, cur, {.num_subbands = 4, .capacity = 3}), ContractError);
}
