#include "dmimo/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <span>

#include "dmimo/channel.hpp"
#include "dmimo/parallel.hpp"
#include "dmimo/random.hpp"

namespace dmimo {

namespace {

constexpr double kDenominatorFloor = 1e-30;

// Relative floor: caps SINR at 1e30 without breaking weight-scale invariance.
double floored(double denominator, double signal) {
    return std::max(denominator, kDenominatorFloor * std::max(signal, std::numeric_limits<double>::min()));
}

cplx trace_product(const CMatrix& a, const CMatrix& b) { return a.cwiseProduct(b.transpose()).sum(); }

McEstimate summarize(const std::vector<double>& values) {
    McEstimate out;
    const std::size_t n = values.size();
    if (n == 0) return out;
    out.mean = pairwise_sum(std::span<const double>(values)) / static_cast<double>(n);
    if (n > 1) {
        std::vector<double> sq(n);
        for (std::size_t i = 0; i < n; ++i) sq[i] = (values[i] - out.mean) * (values[i] - out.mean);
        const double var = pairwise_sum(std::span<const double>(sq)) / static_cast<double>(n - 1);
        out.se = std::sqrt(var / static_cast<double>(n));
    }
    return out;
}

}  // namespace

std::vector<int> Allocation::band_of(int num_users) const {
    std::vector<int> band(num_users, -1);
    for (std::size_t i = 0; i < groups.size(); ++i) {
        for (int k : groups[i]) band.at(k) = static_cast<int>(i);
    }
    return band;
}

Eigen::MatrixXd equal_weights(const Scenario& scenario) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(scenario.num_satellites(), scenario.num_users());
    for (int k = 0; k < scenario.num_users(); ++k) {
        const auto& s = scenario.serving(k);
        for (int m : s) w(m, k) = 1.0 / std::sqrt(static_cast<double>(s.size()));
    }
    return w;
}

void normalize_weights(const Scenario& scenario, Eigen::MatrixXd& weights) {
    for (int k = 0; k < scenario.num_users(); ++k) {
        double norm2 = 0.0;
        for (int m : scenario.serving(k)) norm2 += weights(m, k) * weights(m, k);
        if (!(norm2 > 0.0)) throw DomainError("normalize_weights: zero weight vector");
        const double s = 1.0 / std::sqrt(norm2);
        for (int m : scenario.serving(k)) weights(m, k) *= s;
    }
}

std::vector<double> equal_bandwidths(const Scenario& scenario, std::size_t groups) {
    if (groups == 0) return {};
    return std::vector<double>(groups, scenario.config().total_bandwidth / static_cast<double>(groups));
}

Allocation equal_allocation(const Scenario& scenario, std::vector<std::vector<int>> groups) {
    Allocation a;
    for (auto& g : groups) {
        if (!g.empty()) a.groups.push_back(std::move(g));
    }
    a.bandwidths = equal_bandwidths(scenario, a.groups.size());
    a.powers.assign(scenario.num_users(), scenario.config().max_power);
    a.weights = equal_weights(scenario);
    return a;
}

RateModel::RateModel(const Scenario& scenario, const EstimationTable& table)
    : scenario_(&scenario), K_(scenario.num_users()) {
    const int M = scenario.num_satellites();
    const std::size_t n2 = static_cast<std::size_t>(M) * K_;
    desired_.assign(n2, 0.0);
    leakage_.assign(n2 * K_, 0.0);
    los_cross_.assign(n2 * K_, cplx{});
    pilot_cross_.assign(n2 * K_, cplx{});

    std::vector<CVector> mean(n2);
    for (int m = 0; m < M; ++m) {
        for (int k = 0; k < K_; ++k) mean[idx(m, k)] = scenario.link(m, k).mean();
    }
    for (int m = 0; m < M; ++m) {
        for (int k = 0; k < K_; ++k) {
            if (!scenario.serves(m, k)) continue;
            const auto& est = table.at(m, k);
            const CVector& mk = mean[idx(m, k)];
            desired_[idx(m, k)] = est.c.trace().real() + mk.squaredNorm();
            for (int j = 0; j < K_; ++j) {
                const CVector& mj = mean[idx(m, j)];
                const CMatrix& rj = table.at(m, j).r;
                const double v = mj.dot(est.c * mj).real() + mk.dot(rj * mk).real() + trace_product(rj, est.c).real();
                leakage_[idx3(m, k, j)] = v;
                los_cross_[idx3(m, k, j)] = mk.dot(mj);
                pilot_cross_[idx3(m, k, j)] = table.cross_trace(m, k, j);
            }
        }
    }
}

SinrTerms RateModel::terms(const Allocation& allocation, int k) const {
    const auto band = allocation.band_of(K_);
    if (k < 0 || k >= K_ || band[k] < 0) throw ContractError("sinr_lower_bound: user is not scheduled");
    const auto& sc = *scenario_;
    SinrTerms t;
    t.user = k;
    t.band = band[k];
    t.bandwidth = allocation.bandwidths.at(t.band);
    t.noise = sc.noise_power(t.bandwidth);
    t.i1.assign(K_, 0.0);
    t.i2.assign(K_, 0.0);
    t.i3.assign(K_, 0.0);

    const auto& serving = sc.serving(k);
    double sum_a = 0.0;
    double sum_wwa = 0.0;
    for (int m : serving) {
        const double w = allocation.weights(m, k);
        sum_a += w * desired(m, k);
        sum_wwa += w * w * desired(m, k);
    }
    const double pk = allocation.powers.at(k);
    t.ds = std::sqrt(pk) * sum_a;
    t.i_noise = t.noise * sum_wwa;

    double denom = t.i_noise;
    for (int j : allocation.groups[t.band]) {
        double i1 = 0.0;
        cplx g{};
        cplx gt{};
        for (int m : serving) {
            const double w = allocation.weights(m, k);
            i1 += w * w * leakage(m, k, j);
            g += w * los_cross(m, k, j);
            gt += w * (los_cross(m, k, j) + std::conj(pilot_cross(m, k, j)));
        }
        t.i1[j] = i1;
        const double pj = allocation.powers.at(j);
        denom += pj * i1;
        if (j == k) continue;
        t.i2[j] = std::norm(g);
        if (sc.pilots().share_pilot(k, j)) t.i3[j] = std::norm(gt) - std::norm(g);
        denom += pj * (t.i2[j] + t.i3[j]);
    }
    t.denominator = floored(denom, t.signal());
    t.sinr_lb = t.signal() / t.denominator;
    t.rate_lb = t.bandwidth * std::log2(1.0 + t.sinr_lb);
    return t;
}

std::vector<SinrTerms> RateModel::all_terms(const Allocation& allocation) const {
    std::vector<SinrTerms> out;
    for (const auto& g : allocation.groups) {
        for (int k : g) out.push_back(terms(allocation, k));
    }
    std::sort(out.begin(), out.end(), [](const SinrTerms& a, const SinrTerms& b) { return a.user < b.user; });
    return out;
}

std::vector<double> RateModel::rates(const Allocation& allocation) const {
    std::vector<double> r(K_, 0.0);
    for (const auto& g : allocation.groups) {
        for (int k : g) r[k] = terms(allocation, k).rate_lb;
    }
    return r;
}

double RateModel::sum_rate(const Allocation& allocation) const {
    const auto r = rates(allocation);
    return pairwise_sum(std::span<const double>(r));
}

double RateModel::interference_from(const Allocation& allocation, int k, int j) const {
    const auto t = terms(allocation, k);
    return allocation.powers.at(j) * (t.i1[j] + t.i2[j] + t.i3[j]);
}

SinrTerms sinr_lower_bound(const RateModel& model, const Allocation& allocation, int k) {
    return model.terms(allocation, k);
}

double sinr_los_limit(const Scenario& scenario, const Allocation& allocation, int k) {
    const int K = scenario.num_users();
    const auto band = allocation.band_of(K);
    if (band.at(k) < 0) throw ContractError("sinr_los_limit: user is not scheduled");
    const double n = scenario.num_antennas();
    const double noise = scenario.noise_power(allocation.bandwidths.at(band[k]));
    double sum_wb = 0.0;
    double noise_term = 0.0;
    for (int m : scenario.serving(k)) {
        const double w = allocation.weights(m, k);
        const double b = scenario.link(m, k).beta;
        sum_wb += w * b;
        noise_term += w * w * n * noise * b;
    }
    double interference = 0.0;
    for (int j : allocation.groups[band[k]]) {
        if (j == k) continue;
        cplx s{};
        for (int m : scenario.serving(k)) {
            const auto& lk = scenario.link(m, k);
            const auto& lj = scenario.link(m, j);
            s += allocation.weights(m, k) * std::sqrt(lk.beta * lj.beta) * lk.los.dot(lj.los);
        }
        interference += allocation.powers.at(j) * std::norm(s);
    }
    const double signal = allocation.powers.at(k) * n * n * sum_wb * sum_wb;
    return signal / floored(noise_term + interference, signal);
}

namespace {

struct TrialRecord {
    std::vector<cplx> x;        // Σ w ĥ_k^H h_k, per user
    std::vector<double> ui;     // p_j |Σ w ĥ_k^H h_j|², [k * K + j]
    std::vector<double> noise;  // |Σ w ĥ_k^H n|², per user
    std::vector<double> rate;   // per-draw rate, per user
};

}  // namespace

MonteCarloReport monte_carlo_terms(const Scenario& scenario, const EstimationTable& table,
                                   const Allocation& allocation, std::size_t trials, std::uint64_t seed) {
    if (trials < 2) throw DomainError("monte_carlo_terms: need at least two trials");
    const int M = scenario.num_satellites();
    const int K = scenario.num_users();
    const int N = scenario.num_antennas();
    const auto band = allocation.band_of(K);
    const std::size_t bands = allocation.groups.size();
    const RateModel model(scenario, table);
    std::vector<SinrTerms> closed(K);
    std::vector<double> mean_amp(K, 0.0);
    for (int k = 0; k < K; ++k) {
        if (band[k] < 0) continue;
        closed[k] = model.terms(allocation, k);
        mean_amp[k] = closed[k].ds / std::sqrt(std::max(allocation.powers[k], 1e-300));
    }
    std::vector<double> band_noise(bands);
    for (std::size_t i = 0; i < bands; ++i) band_noise[i] = scenario.noise_power(allocation.bandwidths[i]);

    auto run = [&](std::size_t t) {
        Rng rng = child_stream(seed, t);
        const auto channel = sample_channel(scenario, rng);
        const auto obs = observe_pilots(scenario, channel, rng);
        const auto est = estimate_channels(scenario, table, obs);
        std::vector<CVector> data_noise;
        data_noise.reserve(bands * M);
        for (std::size_t i = 0; i < bands; ++i) {
            for (int m = 0; m < M; ++m) data_noise.push_back(complex_normal_vector(rng, N, band_noise[i]));
        }
        TrialRecord rec;
        rec.x.assign(K, cplx{});
        rec.ui.assign(static_cast<std::size_t>(K) * K, 0.0);
        rec.noise.assign(K, 0.0);
        rec.rate.assign(K, 0.0);
        for (int k = 0; k < K; ++k) {
            if (band[k] < 0) continue;
            const int i = band[k];
            cplx x{};
            cplx nz{};
            double hn = 0.0;
            for (int m : scenario.serving(k)) {
                const double w = allocation.weights(m, k);
                const CVector& hh = est.at(m, k);
                x += w * hh.dot(channel.at(m, k));
                nz += w * hh.dot(data_noise[static_cast<std::size_t>(i) * M + m]);
                hn += w * w * hh.squaredNorm();
            }
            rec.x[k] = x;
            rec.noise[k] = std::norm(nz);
            double interference = 0.0;
            for (int j : allocation.groups[i]) {
                if (j == k) continue;
                cplx y{};
                for (int m : scenario.serving(k)) y += allocation.weights(m, k) * est.at(m, k).dot(channel.at(m, j));
                const double v = allocation.powers[j] * std::norm(y);
                rec.ui[static_cast<std::size_t>(k) * K + j] = v;
                interference += v;
            }
            const double pk = allocation.powers[k];
            const double leak = pk * std::norm(x - mean_amp[k]);
            const double denom = floored(leak + interference + band_noise[i] * hn, closed[k].signal());
            rec.rate[k] = allocation.bandwidths[i] * std::log2(1.0 + closed[k].signal() / denom);
        }
        return rec;
    };
    const auto records = parallel_map<TrialRecord>(trials, run);

    MonteCarloReport report;
    report.trials = trials;
    const double n = static_cast<double>(trials);
    std::vector<double> col(trials);
    for (int k = 0; k < K; ++k) {
        UserMonteCarlo u;
        u.user = k;
        u.ui.assign(K, McEstimate{});
        if (band[k] < 0) {
            report.users.push_back(std::move(u));
            continue;
        }
        const double pk = allocation.powers[k];
        for (std::size_t t = 0; t < trials; ++t) col[t] = records[t].x[k].real();
        const double mre = pairwise_sum(std::span<const double>(col)) / n;
        for (std::size_t t = 0; t < trials; ++t) col[t] = records[t].x[k].imag();
        const double mim = pairwise_sum(std::span<const double>(col)) / n;
        const cplx xbar(mre, mim);
        const double amp = std::abs(xbar);
        u.ds2.mean = pk * amp * amp;
        if (amp > 0.0) {
            const cplx dir = std::conj(xbar) / amp;
            for (std::size_t t = 0; t < trials; ++t) col[t] = (dir * records[t].x[k]).real();
            u.ds2.se = pk * 2.0 * amp * summarize(col).se;
        }
        for (std::size_t t = 0; t < trials; ++t) col[t] = pk * std::norm(records[t].x[k] - xbar) * n / (n - 1.0);
        u.ls = summarize(col);
        double ui_total = 0.0;
        for (int j : allocation.groups[band[k]]) {
            if (j == k) continue;
            for (std::size_t t = 0; t < trials; ++t) col[t] = records[t].ui[static_cast<std::size_t>(k) * K + j];
            u.ui[j] = summarize(col);
            ui_total += u.ui[j].mean;
        }
        for (std::size_t t = 0; t < trials; ++t) col[t] = records[t].noise[k];
        u.noise = summarize(col);
        for (std::size_t t = 0; t < trials; ++t) col[t] = records[t].rate[k];
        u.ergodic_rate = summarize(col);
        const double denom = floored(u.ls.mean + ui_total + u.noise.mean, u.ds2.mean);
        u.bound_form_rate = allocation.bandwidths[band[k]] * std::log2(1.0 + u.ds2.mean / denom);
        report.users.push_back(std::move(u));
    }
    for (std::size_t t = 0; t < trials; ++t) {
        col[t] = pairwise_sum(std::span<const double>(records[t].rate));
    }
    report.sum_ergodic_rate = summarize(col);
    return report;
}

McEstimate ergodic_rate_mc(const Scenario& scenario, const EstimationTable& table, const Allocation& allocation,
                           int k, std::size_t trials, std::uint64_t seed) {
    if (allocation.band_of(scenario.num_users()).at(k) < 0) throw ContractError("ergodic_rate_mc: user not scheduled");
    return monte_carlo_terms(scenario, table, allocation, trials, seed).users.at(k).ergodic_rate;
}

void write_rate_report(std::ostream& out, const RateModel& model, const Allocation& allocation,
                       const MonteCarloReport& report) {
    out << "user,term,closed_form,mc_mean,mc_se,trials\n";
    const auto row = [&](int k, const std::string& term, double closed, const McEstimate& mc) {
        out << k << ',' << term << ',' << closed << ',' << mc.mean << ',' << mc.se << ',' << report.trials << '\n';
    };
    for (const auto& u : report.users) {
        const int k = u.user;
        if (allocation.band_of(model.scenario().num_users())[k] < 0) continue;
        const auto t = model.terms(allocation, k);
        const double pk = allocation.powers[k];
        row(k, "ds2", t.signal(), u.ds2);
        row(k, "ls", pk * t.i1[k], u.ls);
        for (int j : allocation.groups[t.band]) {
            if (j == k) continue;
            const double closed = allocation.powers[j] * (t.i1[j] + t.i2[j] + t.i3[j]);
            row(k, "ui_" + std::to_string(j), closed, u.ui[j]);
        }
        row(k, "noise", t.i_noise, u.noise);
        row(k, "rate", t.rate_lb, u.ergodic_rate);
    }
}

}  // namespace dmimo
