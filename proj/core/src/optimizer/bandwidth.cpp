#include "dmimo/optimizer/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace dmimo {

namespace {

constexpr double kLn2 = std::numbers::ln2;

struct BandSums {
    double value = 0.0;
    double first = 0.0;
    double second = 0.0;
};

BandSums band_sums(const std::vector<RateShape>& users, double x) {
    BandSums s;
    for (const auto& u : users) {
        s.value += u.value(x);
        s.first += u.first(x);
        s.second += u.second(x);
    }
    return s;
}

double total_rate(const std::vector<std::vector<RateShape>>& bands, const std::vector<double>& x) {
    double v = 0.0;
    for (std::size_t i = 0; i < bands.size(); ++i) v += band_sums(bands[i], x[i]).value;
    return v;
}

}  // namespace

double RateShape::value(double x) const { return x * std::log2(1.0 + a / (b * x + c)); }

double RateShape::first(double x) const {
    // ln(1 + u) - u b x / (d (1 + u)) = [-ln(1 - w) - w] + w c / d with w = a / (d + a)
    const double d = b * x + c;
    const double w = a / (d + a);
    double head;
    if (w < 0.25) {
        head = 0.0;
        double p = w;
        for (int k = 2; k < 60; ++k) {
            p *= w;
            const double t = p / k;
            head += t;
            if (t < 1e-17 * head) break;
        }
    } else {
        head = -std::log1p(-w) - w;
    }
    return (head + w * c / d) / kLn2;
}

double RateShape::second(double x) const {
    const double d = b * x + c;
    return -a * b * (a * b * x + 2.0 * b * c * x + 2.0 * c * c + 2.0 * a * c) / (kLn2 * d * d * (d + a) * (d + a));
}

double RateShape::supremum() const { return a / (b * kLn2); }

double RateShape::inverse(double rate) const {
    if (rate <= 0.0) return 0.0;
    if (rate >= supremum()) return std::numeric_limits<double>::infinity();
    double lo = 0.0;
    double hi = 1.0;
    while (value(hi) < rate) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (value(mid) < rate ? lo : hi) = mid;
    }
    return hi;
}

RateShape rate_shape(const SinrTerms& terms) {
    RateShape s;
    s.a = terms.signal();
    s.b = terms.i_noise / terms.bandwidth;
    s.c = std::max(0.0, terms.denominator - terms.i_noise);
    return s;
}

BandwidthResult solve_bandwidth(const std::vector<std::vector<RateShape>>& bands, double total, double requirement,
                                const BandwidthOptions& options) {
    const std::size_t n = bands.size();
    if (n == 0) throw ContractError("solve_bandwidth: no bands");
    if (!(total > 0.0)) throw DomainError("solve_bandwidth: total bandwidth must be > 0");
    BandwidthResult out;
    out.floors.assign(n, 0.0);
    double floor_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& u : bands[i]) {
            if (!(u.a > 0.0) || !(u.b > 0.0) || u.c < 0.0) throw DomainError("solve_bandwidth: need a, b > 0 and c >= 0");
            out.floors[i] = std::max(out.floors[i], u.inverse(requirement));
        }
        if (!std::isfinite(out.floors[i])) {
            throw InfeasibleError("bandwidth", "a rate floor exceeds the user's rate supremum", 0.0);
        }
        floor_sum += out.floors[i];
    }
    if (floor_sum > total) throw InfeasibleError("bandwidth", "rate floors need more than the total bandwidth", total / floor_sum);

    const double lower_floor = 1e-12 * total;
    std::vector<double> lo(n);
    double lo_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) lo_sum += lo[i] = std::max(out.floors[i], lower_floor);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = lo[i] + (total - lo_sum) / static_cast<double>(n);

    std::vector<double> g(n), h(n), y(n), trial(n);
    std::vector<bool> free(n);
    // Newton model maximizer over the feasible set: y_i = clamp(x_i + (g_i - mu) / |h_i|), sum y = total
    const auto newton_point = [&] {
        const auto fill = [&](double mu) {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) sum += y[i] = std::clamp(x[i] + (g[i] - mu) / -h[i], lo[i], total);
            return sum;
        };
        double mu_lo = *std::min_element(g.begin(), g.end());
        double mu_hi = *std::max_element(g.begin(), g.end());
        for (double w = 1.0; fill(mu_lo) < total && w < 1e300; w *= 2.0) mu_lo -= w;
        for (double w = 1.0; fill(mu_hi) > total && w < 1e300; w *= 2.0) mu_hi += w;
        for (int it = 0; it < 200 && mu_hi - mu_lo > 1e-16 * std::max(1.0, std::abs(mu_hi)); ++it) {
            const double mid = 0.5 * (mu_lo + mu_hi);
            (fill(mid) > total ? mu_lo : mu_hi) = mid;
        }
        fill(mu_hi);
        // absorb rounding so the budget stays exact
        double sum = 0.0;
        for (double v : y) sum += v;
        const auto pivot = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
        y[pivot] += total - sum;
    };
    for (;;) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto s = band_sums(bands[i], x[i]);
            g[i] = s.first;
            h[i] = std::min(s.second, -1e-300);
            free[i] = x[i] - lo[i] > 1e-12 * total;
        }
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!free[i]) continue;
            num += g[i] / -h[i];
            den += 1.0 / -h[i];
        }
        const double nu = den > 0.0 ? num / den : *std::max_element(g.begin(), g.end());
        double residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            residual = std::max(residual, free[i] ? std::abs(g[i] - nu) : std::max(0.0, g[i] - nu));
        }
        out.sum_rate = total_rate(bands, x);
        out.kkt_residual = residual;
        out.trace.push_back({out.iterations, out.sum_rate, residual});
        if (residual <= options.kkt_tolerance || out.iterations >= options.max_iterations) break;

        newton_point();
        double slope = 0.0;
        for (std::size_t i = 0; i < n; ++i) slope += g[i] * (y[i] - x[i]);
        double step = 1.0;
        const auto move = [&](double s) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = std::max(lo[i], x[i] + s * (y[i] - x[i]));
        };
        // gains below the rounding of the sum cannot be resolved; Newton steps are taken as is there
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(out.sum_rate);
        move(step);
        while (step * slope > noise && total_rate(bands, trial) < out.sum_rate + 1e-4 * step * slope && step > 1e-12) {
            step *= 0.5;
            move(step);
        }
        ++out.iterations;
        if (total_rate(bands, trial) < out.sum_rate - noise || trial == x) break;
        x = trial;
    }
    out.bandwidths = x;
    return out;
}

BandwidthResult optimize_bandwidth(const RateModel& model, const Allocation& allocation, double requirement,
                                   const BandwidthOptions& options) {
    std::vector<std::vector<RateShape>> bands(allocation.groups.size());
    for (std::size_t i = 0; i < allocation.groups.size(); ++i) {
        for (int k : allocation.groups[i]) bands[i].push_back(rate_shape(model.terms(allocation, k)));
    }
    return solve_bandwidth(bands, model.scenario().config().total_bandwidth, requirement, options);
}

}  // namespace dmimo
