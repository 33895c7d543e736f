#include "dmimo/optimizer/power_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dmimo/optimizer/sca.hpp"

namespace dmimo {

namespace {

enum class GpKind { sca, feasibility };

constexpr double kMinPower = 1e-9;   // relative to P^{max}
constexpr double kMinWeight = 1e-6;
constexpr double kMinChi = 1e-12;
constexpr double kMaxChi = 1e12;

Monomial var(int index, double exponent = 1.0) { return Monomial{1.0, {{index, exponent}}}; }

Monomial scaled(Monomial m, double c) {
    m.coeff *= c;
    return m;
}

bool meets_requirements(const RateModel& model, const Allocation& a, double requirement) {
    const auto rates = model.rates(a);
    for (const auto& g : a.groups) {
        for (int k : g) {
            if (rates[k] < requirement * (1.0 - 1e-9)) return false;
        }
    }
    return true;
}

double feasibility_slack(const RateModel& model, const Allocation& a, double requirement) {
    double phi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.groups.size(); ++i) {
        const double gamma = required_sinr(requirement, a.bandwidths[i]);
        if (!(gamma > 0.0)) continue;
        for (int k : a.groups[i]) phi = std::min(phi, model.sinr(a, k) / gamma);
    }
    return phi;
}

PowerGp build(const RateModel& model, const Allocation& anchor, double requirement, WeightMode mode, GpKind kind) {
    const auto& sc = model.scenario();
    const int K = sc.num_users();
    const double pmax = sc.config().max_power;
    PowerGp gp;
    auto& prob = gp.problem;
    auto& lay = gp.layout;
    lay.chi.assign(K, -1);
    lay.power.assign(K, -1);
    lay.weight.assign(K, {});
    lay.sinr_constraint.assign(K, -1);
    gp.objective_weight.assign(K, 0.0);
    gp.objective_offset.assign(K, 0.0);
    std::vector<double> at;
    const auto add = [&](double lo, double hi, double value) {
        at.push_back(std::clamp(value, lo, hi));
        return prob.add_variable(lo, hi);
    };

    std::vector<double> gamma(K, 0.0);
    std::vector<double> sinr(K, 0.0);
    std::vector<double> bw(K, 0.0);
    for (std::size_t i = 0; i < anchor.groups.size(); ++i) {
        for (int k : anchor.groups[i]) {
            bw[k] = anchor.bandwidths[i];
            gamma[k] = required_sinr(requirement, bw[k]);
            sinr[k] = model.sinr(anchor, k);
            lay.power[k] = add(kMinPower, 1.0, anchor.powers[k] / pmax);
            if (mode == WeightMode::optimize) {
                for (int m : sc.serving(k)) lay.weight[k].push_back(add(kMinWeight, 1.0, anchor.weights(m, k)));
            }
        }
    }

    if (kind == GpKind::sca) {
        const double total = sc.config().total_bandwidth;
        for (const auto& g : anchor.groups) {
            for (int k : g) {
                lay.chi[k] = add(kMinChi, kMaxChi, sinr[k]);
                const auto s = sca_coefficients(std::clamp(sinr[k], kMinChi, kMaxChi));
                gp.objective_weight[k] = s.psi * bw[k];
                gp.objective_offset[k] = bw[k] * s.delta;
                prob.objective.exponents.emplace_back(lay.chi[k], -gp.objective_weight[k] / total);
                if (gamma[k] > 0.0) prob.constraints.push_back({{Monomial{gamma[k], {{lay.chi[k], -1.0}}}}});
            }
        }
    } else {
        lay.phi = add(kMinChi, kMaxChi, feasibility_slack(model, anchor, requirement));
        prob.objective = var(lay.phi, -1.0);
    }
    gp.anchor = Eigen::Map<const Eigen::VectorXd>(at.data(), static_cast<Eigen::Index>(at.size()));

    if (mode == WeightMode::optimize) {
        for (int k = 0; k < K; ++k) {
            if (lay.weight[k].empty()) continue;
            Posynomial norm;
            for (int idx : lay.weight[k]) norm.terms.push_back(var(idx, 2.0));
            prob.constraints.push_back(std::move(norm));
        }
    }

    for (std::size_t i = 0; i < anchor.groups.size(); ++i) {
        const double noise = sc.noise_power(anchor.bandwidths[i]);
        for (int k : anchor.groups[i]) {
            if (kind == GpKind::feasibility && !(gamma[k] > 0.0)) continue;
            const auto& serving = sc.serving(k);
            const auto n = serving.size();
            const Monomial scale = kind == GpKind::sca ? var(lay.chi[k]) : Monomial{gamma[k], {{lay.phi, 1.0}}};
            Monomial numerator = scaled(var(lay.power[k]), pmax);
            std::vector<Monomial> pos;
            std::vector<Monomial> neg;

            if (mode == WeightMode::optimize) {
                std::vector<double> a(n), w_hat(n);
                for (std::size_t q = 0; q < n; ++q) {
                    a[q] = model.desired(serving[q], k);
                    w_hat[q] = gp.anchor[lay.weight[k][q]];
                }
                const auto bound = monomial_bound(a, w_hat);
                numerator.coeff *= bound.c;
                for (std::size_t q = 0; q < n; ++q) numerator.exponents.emplace_back(lay.weight[k][q], 2.0 * bound.alpha[q]);
                const auto w = [&](std::size_t q) { return var(lay.weight[k][q]); };
                for (std::size_t q = 0; q < n; ++q) {
                    const double c = noise * a[q];
                    if (c > 0.0) pos.push_back(scaled(var(lay.weight[k][q], 2.0), c));
                }
                for (int j : anchor.groups[i]) {
                    std::vector<cplx> h(n);
                    for (std::size_t q = 0; q < n; ++q) {
                        const int m = serving[q];
                        const double v = model.leakage(m, k, j);
                        if (v > 0.0) pos.push_back(scaled(var(lay.power[j]).times(var(lay.weight[k][q], 2.0)), pmax * v));
                        h[q] = model.los_cross(m, k, j) + std::conj(model.pilot_cross(m, k, j));
                    }
                    if (j == k) continue;
                    for (std::size_t q = 0; q < n; ++q) {
                        const double d = std::norm(h[q]);
                        if (d > 0.0) pos.push_back(scaled(var(lay.power[j]).times(var(lay.weight[k][q], 2.0)), pmax * d));
                        for (std::size_t r = q + 1; r < n; ++r) {
                            const double x = 2.0 * std::real(h[q] * std::conj(h[r])) * pmax;
                            if (x == 0.0) continue;
                            Monomial t = var(lay.power[j]).times(w(q)).times(w(r));
                            (x > 0.0 ? pos : neg).push_back(scaled(t, std::abs(x)));
                        }
                    }
                }
            } else {
                double sum_a = 0.0;
                double sum_wwa = 0.0;
                for (int m : serving) {
                    const double w = anchor.weights(m, k);
                    sum_a += w * model.desired(m, k);
                    sum_wwa += w * w * model.desired(m, k);
                }
                numerator.coeff *= sum_a * sum_a;
                if (noise * sum_wwa > 0.0) pos.push_back(Monomial{noise * sum_wwa, {}});
                for (int j : anchor.groups[i]) {
                    double c = 0.0;
                    cplx h{};
                    for (int m : serving) {
                        const double w = anchor.weights(m, k);
                        c += w * w * model.leakage(m, k, j);
                        h += w * (model.los_cross(m, k, j) + std::conj(model.pilot_cross(m, k, j)));
                    }
                    if (j != k) c += std::norm(h);
                    if (c > 0.0) pos.push_back(scaled(var(lay.power[j]), pmax * c));
                }
            }
            if (!(numerator.coeff > 0.0)) throw DegenerateError("power gp: zero desired signal");

            Monomial rhs = numerator;
            if (!neg.empty()) {
                Posynomial side{{numerator}};
                for (auto& t : neg) side.terms.push_back(t.times(scale));
                rhs = condense(side, gp.anchor);
            }
            gp.negative_terms += static_cast<int>(neg.size());
            Monomial inv = rhs;
            inv.power(-1.0);
            Posynomial constraint;
            for (auto& t : pos) constraint.terms.push_back(t.times(scale).times(inv));
            lay.sinr_constraint[k] = static_cast<int>(prob.constraints.size());
            prob.constraints.push_back(std::move(constraint));
        }
    }
    return gp;
}

}  // namespace

double required_sinr(double requirement, double bandwidth) {
    if (!(bandwidth > 0.0)) throw DomainError("required_sinr: bandwidth must be > 0");
    return std::max(0.0, std::exp2(requirement / bandwidth) - 1.0);
}

PowerGp build_power_gp(const RateModel& model, const Allocation& anchor, double requirement, WeightMode mode) {
    return build(model, anchor, requirement, mode, GpKind::sca);
}

PowerGp build_feasibility_gp(const RateModel& model, const Allocation& anchor, double requirement, WeightMode mode) {
    if (!std::isfinite(feasibility_slack(model, anchor, requirement))) {
        throw ContractError("build_feasibility_gp: no positive rate requirement");
    }
    return build(model, anchor, requirement, mode, GpKind::feasibility);
}

Allocation apply_solution(const RateModel& model, const Allocation& base, const PowerGp& gp, const Eigen::VectorXd& x) {
    const auto& sc = model.scenario();
    const double pmax = sc.config().max_power;
    Allocation a = base;
    for (const auto& g : a.groups) {
        for (int k : g) {
            a.powers[k] = pmax * x[gp.layout.power[k]];
            const auto& idx = gp.layout.weight[k];
            if (idx.empty()) continue;
            double norm2 = 0.0;
            for (int v : idx) norm2 += x[v] * x[v];
            const double s = 1.0 / std::sqrt(norm2);
            const auto& serving = sc.serving(k);
            for (std::size_t q = 0; q < idx.size(); ++q) a.weights(serving[q], k) = x[idx[q]] * s;
        }
    }
    return a;
}

double surrogate_rate(const PowerGp& gp, const Eigen::VectorXd& x) {
    double v = 0.0;
    for (std::size_t k = 0; k < gp.layout.chi.size(); ++k) {
        if (gp.layout.chi[k] < 0) continue;
        v += gp.objective_weight[k] * std::log2(x[gp.layout.chi[k]]) + gp.objective_offset[k];
    }
    return v;
}

FeasibilityReport feasibility_check(const RateModel& model, const Allocation& allocation, double requirement,
                                    const PowerControlOptions& options) {
    FeasibilityReport rep;
    rep.allocation = allocation;
    double best = feasibility_slack(model, allocation, requirement);
    if (!std::isfinite(best)) {
        rep.phi = best;
        rep.feasible = true;
        return rep;
    }
    Allocation current = allocation;
    for (int round = 0; round < options.feasibility_rounds; ++round) {
        const auto gp = build_feasibility_gp(model, current, requirement, options.weights);
        const auto res = solve_gp(gp.problem, &gp.anchor, options.gp);
        rep.status = res.status;
        if (res.status != GpStatus::optimal && res.status != GpStatus::unbounded) break;
        ++rep.rounds;
        const Allocation cand = apply_solution(model, current, gp, res.x);
        const double phi = feasibility_slack(model, cand, requirement);
        const bool progress = phi > best * (1.0 + 1e-6);
        if (phi > best) {
            best = phi;
            rep.allocation = cand;
        }
        if (!progress) break;
        current = cand;
    }
    rep.phi = best;
    rep.feasible = best >= 1.0 - 1e-9;
    return rep;
}

PowerControlResult optimize_power_weights(const RateModel& model, const Allocation& allocation, double requirement,
                                          const PowerControlOptions& options) {
    PowerControlResult out;
    out.feasibility = feasibility_check(model, allocation, requirement, options);
    if (!out.feasibility.feasible) {
        throw InfeasibleError("power_control", "rate requirements are not attainable", out.feasibility.phi);
    }
    Allocation current = allocation;
    const double pmax = model.scenario().config().max_power;
    for (const auto& g : current.groups) {
        for (int k : g) current.powers[k] = pmax;
    }
    if (options.weights == WeightMode::optimize) current.weights = out.feasibility.allocation.weights;
    if (!meets_requirements(model, current, requirement)) {
        current.powers = out.feasibility.allocation.powers;
        out.started_from_feasibility_powers = true;
    }

    double obj = model.sum_rate(current);
    double prev = 0.0;
    out.trace.push_back({0, obj, obj, 0.0, 0, 0, GpStatus::optimal});
    while (obj > 0.0 && (obj - prev) / obj >= options.tolerance && out.iterations < options.max_iterations) {
        const auto gp = build_power_gp(model, current, requirement, options.weights);
        const auto res = solve_gp(gp.problem, &gp.anchor, options.gp);
        ++out.iterations;
        PowerControlTraceRow row{out.iterations, obj, 0.0, res.kkt_residual, res.newton_steps, gp.negative_terms,
                                 res.status};
        if (res.status != GpStatus::optimal) {
            out.trace.push_back(row);
            break;
        }
        const Allocation cand = apply_solution(model, current, gp, res.x);
        const double value = model.sum_rate(cand);
        row.sum_rate = value;
        row.surrogate = surrogate_rate(gp, res.x);
        out.trace.push_back(row);
        prev = obj;
        if (value < obj || !meets_requirements(model, cand, requirement)) break;
        current = cand;
        obj = value;
    }
    out.converged = obj > 0.0 && (obj - prev) / obj < options.tolerance;
    out.allocation = current;
    out.sum_rate = obj;
    return out;
}

}  // namespace dmimo
