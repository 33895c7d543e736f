#include "dmimo/scheduler.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace dmimo {

namespace {

double normalized_cross(const Scenario& s, const ChannelEstimate& est, int k, int j) {
    cplx num{};
    double den = 0.0;
    for (int m : s.serving(k)) {
        num += est.at(m, k).dot(est.at(m, j));
        den += est.at(m, k).squaredNorm();
    }
    if (!(den > 0.0)) throw DegenerateError("correlation_factor: zero-norm channel estimate");
    return std::abs(num) / den;
}

Allocation with_groups(const Scenario& s, const Allocation& current, const std::vector<std::vector<int>>& groups) {
    Allocation a;
    for (const auto& g : groups) {
        if (!g.empty()) a.groups.push_back(g);
    }
    a.bandwidths = equal_bandwidths(s, a.groups.size());
    a.powers = current.powers;
    a.weights = current.weights;
    return a;
}

}  // namespace

double correlation_factor(const Scenario& scenario, const ChannelEstimate& estimate, int k, int j) {
    return normalized_cross(scenario, estimate, k, j) + normalized_cross(scenario, estimate, j, k);
}

Eigen::MatrixXd correlation_factors(const Scenario& scenario, const ChannelEstimate& estimate) {
    const int K = scenario.num_users();
    Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(K, K);
    for (int k = 0; k < K; ++k) {
        for (int j = k + 1; j < K; ++j) rho(k, j) = rho(j, k) = correlation_factor(scenario, estimate, k, j);
    }
    return rho;
}

Adjacency threshold_graph(const Eigen::MatrixXd& rho, double threshold) {
    const auto K = rho.rows();
    Adjacency b = Adjacency::Zero(K, K);
    for (Eigen::Index k = 0; k < K; ++k) {
        for (Eigen::Index j = 0; j < K; ++j) {
            if (k != j && rho(k, j) > 0.0 && rho(k, j) >= threshold) b(k, j) = 1;
        }
    }
    return b;
}

std::vector<std::vector<int>> Coloring::classes() const {
    std::vector<std::vector<int>> out(num_colors);
    for (std::size_t v = 0; v < color.size(); ++v) out[color[v]].push_back(static_cast<int>(v));
    return out;
}

Coloring dsatur_color(const Adjacency& adjacency, int capacity) {
    if (capacity < 1) throw DomainError("dsatur_color: capacity must be >= 1");
    const int n = static_cast<int>(adjacency.rows());
    Coloring c;
    c.color.assign(n, -1);
    std::vector<int> degree(n, 0);
    for (int v = 0; v < n; ++v) {
        for (int u = 0; u < n; ++u) degree[v] += (u != v && adjacency(v, u)) ? 1 : 0;
    }
    std::vector<std::set<int>> neighbour_colors(n);
    std::vector<int> class_size;
    for (int step = 0; step < n; ++step) {
        int pick = -1;
        for (int v = 0; v < n; ++v) {
            if (c.color[v] >= 0) continue;
            if (pick < 0) {
                pick = v;
                continue;
            }
            const auto sv = neighbour_colors[v].size();
            const auto sp = neighbour_colors[pick].size();
            if (sv > sp || (sv == sp && degree[v] > degree[pick])) pick = v;
        }
        int chosen = -1;
        for (int col = 0; col < c.num_colors; ++col) {
            if (!neighbour_colors[pick].contains(col) && class_size[col] < capacity) {
                chosen = col;
                break;
            }
        }
        if (chosen < 0) {
            chosen = c.num_colors++;
            class_size.push_back(0);
        }
        c.color[pick] = chosen;
        ++class_size[chosen];
        for (int u = 0; u < n; ++u) {
            if (u != pick && adjacency(pick, u)) neighbour_colors[u].insert(chosen);
        }
    }
    return c;
}

bool is_proper_coloring(const Adjacency& adjacency, const std::vector<int>& color) {
    const auto n = adjacency.rows();
    for (Eigen::Index v = 0; v < n; ++v) {
        for (Eigen::Index u = 0; u < n; ++u) {
            if (u != v && adjacency(v, u) && color[v] == color[u]) return false;
        }
    }
    return true;
}

std::string schedule_violation(const std::vector<std::vector<int>>& groups, int num_users, int num_subbands,
                               int capacity) {
    std::ostringstream why;
    int nonempty = 0;
    std::vector<int> seen(num_users, 0);
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (groups[i].empty()) continue;
        ++nonempty;
        if (static_cast<int>(groups[i].size()) > capacity) {
            why << "band " << i << " holds " << groups[i].size() << " users, capacity " << capacity;
            return why.str();
        }
        for (int k : groups[i]) {
            if (k < 0 || k >= num_users) {
                why << "user index " << k << " out of range";
                return why.str();
            }
            if (seen[k]++) {
                why << "user " << k << " appears in more than one band";
                return why.str();
            }
        }
    }
    if (nonempty > num_subbands) {
        why << nonempty << " bands used, only " << num_subbands << " available";
        return why.str();
    }
    for (int k = 0; k < num_users; ++k) {
        if (!seen[k]) {
            why << "user " << k << " is not scheduled";
            return why.str();
        }
    }
    return {};
}

ScheduleEvaluation evaluate_schedule(const RateModel& model, const std::vector<std::vector<int>>& groups,
                                     const Allocation& current, double requirement) {
    const Allocation a = with_groups(model.scenario(), current, groups);
    ScheduleEvaluation e;
    e.rates = model.rates(a);
    e.min_rate = std::numeric_limits<double>::infinity();
    for (const auto& g : a.groups) {
        for (int k : g) e.min_rate = std::min(e.min_rate, e.rates[k]);
    }
    for (double r : e.rates) e.sum_rate += r;
    e.meets_requirements = e.min_rate >= requirement;
    return e;
}

Schedule schedule_users(const RateModel& model, const ChannelEstimate& estimate, const Allocation& current,
                        const SchedulerOptions& options) {
    const auto& sc = model.scenario();
    const int K = sc.num_users();
    if (static_cast<long>(options.num_subbands) * options.capacity < K) {
        throw ConfigError("schedule_users: I * N_max < K");
    }
    const Eigen::MatrixXd rho = correlation_factors(sc, estimate);
    double max_rho = 0.0;
    double mean_rho = 0.0;
    for (int k = 0; k < K; ++k) {
        for (int j = 0; j < K; ++j) {
            if (k == j) continue;
            max_rho = std::max(max_rho, rho(k, j));
            mean_rho += rho(k, j);
        }
    }
    if (K > 1) mean_rho /= static_cast<double>(K) * (K - 1);

    double threshold = mean_rho;
    Adjacency required = Adjacency::Zero(K, K);
    const auto graph = [&] {
        Adjacency b = threshold_graph(rho, threshold);
        return Adjacency(b.cwiseMax(required));
    };
    Coloring coloring = dsatur_color(graph(), options.capacity);

    Schedule best;
    Schedule fallback;
    double fallback_rate = -1.0;
    const auto consider = [&](const Coloring& c, int iteration) {
        if (c.num_colors > options.num_subbands) return;
        const auto groups = c.classes();
        if (!schedule_violation(groups, K, options.num_subbands, options.capacity).empty()) return;
        const auto e = evaluate_schedule(model, groups, current, options.requirement);
        if (e.meets_requirements && (!best.feasible || e.sum_rate > best.sum_rate)) {
            best = {groups, c.num_colors, true, e.sum_rate, iteration};
        }
        if (e.sum_rate > fallback_rate) {
            fallback_rate = e.sum_rate;
            fallback = {groups, c.num_colors, false, e.sum_rate, iteration};
        }
    };
    consider(coloring, 0);

    int l = 0;
    while (l < options.max_iterations) {
        ++l;
        if (coloring.num_colors > options.num_subbands) {
            threshold = 0.5 * (threshold + max_rho);
        } else {
            const auto groups = coloring.classes();
            const Allocation a = with_groups(sc, current, groups);
            int worst = -1;
            double worst_sinr = std::numeric_limits<double>::infinity();
            for (int k = 0; k < K; ++k) {
                const double v = model.sinr(a, k);
                if (v < worst_sinr) {
                    worst_sinr = v;
                    worst = k;
                }
            }
            const auto band = a.band_of(K);
            const auto& members = a.groups[band[worst]];
            if (members.size() < 2) break;
            const auto t = model.terms(a, worst);
            int culprit = -1;
            double strongest = -std::numeric_limits<double>::infinity();
            for (int j : members) {
                if (j == worst) continue;
                const double v = a.powers[j] * (t.i1[j] + t.i2[j] + t.i3[j]);
                if (v > strongest) {
                    strongest = v;
                    culprit = j;
                }
            }
            required(worst, culprit) = required(culprit, worst) = 1;
        }
        coloring = dsatur_color(graph(), options.capacity);
        consider(coloring, l);
    }

    if (best.feasible) {
        best.iterations = l;
        return best;
    }
    if (fallback_rate < 0.0) {
        // No coloring fit in I bands: fall back to the conflict-free capacity packing.
        const Coloring packed = dsatur_color(Adjacency::Zero(K, K), options.capacity);
        const auto groups = packed.classes();
        fallback = {groups, packed.num_colors, false,
                    evaluate_schedule(model, groups, current, options.requirement).sum_rate, l};
    }
    fallback.feasible = false;
    fallback.iterations = l;
    return fallback;
}

long count_partitions(int num_users, int num_subbands, int capacity) {
    long count = 0;
    std::vector<int> size;
    std::function<void(int)> rec = [&](int v) {
        if (v == num_users) {
            ++count;
            return;
        }
        for (int b = 0; b <= static_cast<int>(size.size()); ++b) {
            if (b == static_cast<int>(size.size())) {
                if (b >= num_subbands) break;
                size.push_back(1);
                rec(v + 1);
                size.pop_back();
            } else if (size[b] < capacity) {
                ++size[b];
                rec(v + 1);
                --size[b];
            }
        }
    };
    rec(0);
    return count;
}

Schedule exhaustive_schedule(const RateModel& model, const Allocation& current, const SchedulerOptions& options) {
    const int K = model.scenario().num_users();
    if (K > 10) throw ContractError("exhaustive_schedule: refusing K > 10");
    Schedule best;
    Schedule fallback;
    double fallback_rate = -1.0;
    std::vector<std::vector<int>> groups;
    std::function<void(int)> rec = [&](int v) {
        if (v == K) {
            const auto e = evaluate_schedule(model, groups, current, options.requirement);
            if (e.meets_requirements && (!best.feasible || e.sum_rate > best.sum_rate)) {
                best = {groups, static_cast<int>(groups.size()), true, e.sum_rate, 0};
            }
            if (e.sum_rate > fallback_rate) {
                fallback_rate = e.sum_rate;
                fallback = {groups, static_cast<int>(groups.size()), false, e.sum_rate, 0};
            }
            return;
        }
        for (std::size_t b = 0; b <= groups.size(); ++b) {
            if (b == groups.size()) {
                if (static_cast<int>(b) >= options.num_subbands) break;
                groups.push_back({v});
                rec(v + 1);
                groups.pop_back();
                break;
            }
            if (static_cast<int>(groups[b].size()) < options.capacity) {
                groups[b].push_back(v);
                rec(v + 1);
                groups[b].pop_back();
            }
        }
    };
    rec(0);
    return best.feasible ? best : fallback;
}

double all_share_sum_rate(const RateModel& model, const Allocation& current) {
    const int K = model.scenario().num_users();
    Allocation a;
    a.groups.emplace_back(K);
    for (int k = 0; k < K; ++k) a.groups[0][k] = k;
    a.bandwidths = {model.scenario().config().total_bandwidth};
    a.powers = current.powers;
    a.weights = current.weights;
    return model.sum_rate(a);
}

}  // namespace dmimo
