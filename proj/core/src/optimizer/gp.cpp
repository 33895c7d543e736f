#include "dmimo/optimizer/gp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "dmimo/common.hpp"

namespace dmimo {

double Monomial::log_eval(const Eigen::VectorXd& log_x) const {
    double v = std::log(coeff);
    for (const auto& [i, e] : exponents) v += e * log_x[i];
    return v;
}

double Monomial::eval(const Eigen::VectorXd& x) const {
    double v = coeff;
    for (const auto& [i, e] : exponents) v *= std::pow(x[i], e);
    return v;
}

Monomial& Monomial::times(const Monomial& other) {
    coeff *= other.coeff;
    for (const auto& [i, e] : other.exponents) {
        auto it = std::find_if(exponents.begin(), exponents.end(), [i = i](const auto& p) { return p.first == i; });
        if (it == exponents.end()) {
            exponents.emplace_back(i, e);
        } else {
            it->second += e;
        }
    }
    return *this;
}

Monomial& Monomial::power(double e) {
    coeff = std::pow(coeff, e);
    for (auto& p : exponents) p.second *= e;
    return *this;
}

double Monomial::exponent_of(int variable) const {
    double e = 0.0;
    for (const auto& [i, v] : exponents) {
        if (i == variable) e += v;
    }
    return e;
}

double Posynomial::eval(const Eigen::VectorXd& x) const {
    double v = 0.0;
    for (const auto& t : terms) v += t.eval(x);
    return v;
}

int GpProblem::add_variable(double lo, double hi) {
    lower.push_back(lo > 0.0 ? lo : std::exp(-kImplicitLogBound));
    upper.push_back(hi > 0.0 ? hi : std::exp(kImplicitLogBound));
    return num_variables() - 1;
}

void GpProblem::validate() const {
    const int n = num_variables();
    if (static_cast<int>(upper.size()) != n) throw ContractError("GpProblem: bound vectors differ in size");
    for (int i = 0; i < n; ++i) {
        if (!(lower[i] > 0.0) || !(upper[i] > lower[i])) throw DomainError("GpProblem: bounds must satisfy 0 < lo < hi");
    }
    const auto check = [n](const Monomial& m) {
        if (!(m.coeff > 0.0) || !std::isfinite(m.coeff)) throw DomainError("GpProblem: monomial coefficient must be > 0");
        for (const auto& [i, e] : m.exponents) {
            if (i < 0 || i >= n || !std::isfinite(e)) throw DomainError("GpProblem: bad exponent entry");
        }
    };
    check(objective);
    for (const auto& p : constraints) {
        if (p.terms.empty()) throw DomainError("GpProblem: empty posynomial");
        for (const auto& t : p.terms) check(t);
    }
}

double GpProblem::max_violation(const Eigen::VectorXd& x) const {
    double worst = 0.0;
    for (const auto& p : constraints) worst = std::max(worst, p.eval(x) - 1.0);
    for (int i = 0; i < num_variables(); ++i) {
        worst = std::max(worst, (lower[i] - x[i]) / lower[i]);
        worst = std::max(worst, (x[i] - upper[i]) / upper[i]);
    }
    return worst;
}

std::string to_string(GpStatus status) {
    switch (status) {
        case GpStatus::optimal: return "optimal";
        case GpStatus::infeasible: return "infeasible";
        case GpStatus::iteration_limit: return "iteration_limit";
        case GpStatus::unbounded: return "unbounded";
    }
    return "unknown";
}

namespace {

// F(z) = log Σ exp(b + A z) + g·z <= 0
struct LseBlock {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    Eigen::VectorXd g;
};

struct Barrier {
    Eigen::VectorXd c;
    std::vector<LseBlock> blocks;
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    int size() const { return static_cast<int>(c.size()); }
    double constraint_count() const { return static_cast<double>(blocks.size()) + 2.0 * size(); }

    double block_value(const LseBlock& blk, const Eigen::VectorXd& z, Eigen::VectorXd* pi) const {
        const Eigen::VectorXd v = blk.b + blk.a * z;
        const double top = v.maxCoeff();
        const Eigen::VectorXd e = (v.array() - top).exp();
        const double s = e.sum();
        if (pi) *pi = e / s;
        return top + std::log(s) + blk.g.dot(z);
    }

    bool strictly_inside_box(const Eigen::VectorXd& z) const {
        return ((z - lo).array() > 0.0).all() && ((hi - z).array() > 0.0).all();
    }

    // t c·z − Σ log(−F) − Σ log box slacks; +inf outside the domain.
    double value(const Eigen::VectorXd& z, double t) const {
        if (!strictly_inside_box(z)) return std::numeric_limits<double>::infinity();
        double v = t * c.dot(z);
        for (const auto& blk : blocks) {
            const double f = block_value(blk, z, nullptr);
            if (!(f < 0.0)) return std::numeric_limits<double>::infinity();
            v -= std::log(-f);
        }
        v -= (z - lo).array().log().sum() + (hi - z).array().log().sum();
        return v;
    }

    void derivatives(const Eigen::VectorXd& z, double t, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const {
        const int n = size();
        grad = t * c;
        hess = Eigen::MatrixXd::Zero(n, n);
        Eigen::VectorXd pi;
        for (const auto& blk : blocks) {
            const double f = block_value(blk, z, &pi);
            const Eigen::VectorXd df = blk.a.transpose() * pi + blk.g;
            const Eigen::VectorXd apm = blk.a.transpose() * pi;
            const Eigen::MatrixXd d2f = blk.a.transpose() * pi.asDiagonal() * blk.a - apm * apm.transpose();
            grad += df / (-f);
            hess += d2f / (-f) + df * df.transpose() / (f * f);
        }
        const Eigen::ArrayXd sl = (z - lo).array();
        const Eigen::ArrayXd su = (hi - z).array();
        grad.array() += -1.0 / sl + 1.0 / su;
        hess.diagonal().array() += 1.0 / sl.square() + 1.0 / su.square();
    }
};

struct CenterOutcome {
    int steps = 0;
    double kkt = 0.0;
};

CenterOutcome center(const Barrier& bar, Eigen::VectorXd& z, double t, const GpOptions& opt, int budget) {
    CenterOutcome out;
    Eigen::VectorXd g;
    Eigen::MatrixXd h;
    double phi = bar.value(z, t);
    while (out.steps < budget) {
        bar.derivatives(z, t, g, h);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
        Eigen::VectorXd d = ldlt.solve(-g);
        if (ldlt.info() != Eigen::Success || !d.allFinite() || g.dot(d) >= 0.0) {
            const double reg = 1e-12 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
            h.diagonal().array() += reg;
            d = h.llt().solve(-g);
            if (!d.allFinite()) break;
        }
        const double lambda2 = -g.dot(d);
        ++out.steps;
        if (lambda2 / 2.0 <= opt.newton_tolerance) break;
        double s = 1.0;
        // keep inside the box before evaluating
        for (int i = 0; i < bar.size(); ++i) {
            if (d[i] < 0.0) s = std::min(s, 0.99 * (z[i] - bar.lo[i]) / -d[i]);
            if (d[i] > 0.0) s = std::min(s, 0.99 * (bar.hi[i] - z[i]) / d[i]);
        }
        double next = bar.value(z + s * d, t);
        if (lambda2 < 0.0625) {
            // quadratic phase: pure Newton, only pulled back into the domain
            while (!std::isfinite(next) && s > 1e-14) {
                s *= 0.5;
                next = bar.value(z + s * d, t);
            }
            if (!std::isfinite(next)) break;
        } else {
            while (!(next <= phi - 0.01 * s * lambda2) && s > 1e-14) {
                s *= 0.5;
                next = bar.value(z + s * d, t);
            }
            if (!(next <= phi - 0.01 * s * lambda2)) break;  // no representable progress left
        }
        z += s * d;
        phi = next;
    }
    bar.derivatives(z, t, g, h);
    out.kkt = g.norm() / t;
    return out;
}

struct BarrierOutcome {
    int steps = 0;
    double kkt = 0.0;
    bool exhausted = false;
};

BarrierOutcome run_barrier(const Barrier& bar, Eigen::VectorXd& z, const GpOptions& opt,
                           std::vector<GpTraceRow>* trace, const std::function<bool(const Eigen::VectorXd&)>& stop) {
    BarrierOutcome out;
    const double m = bar.constraint_count();
    double t = 1.0;
    for (int outer = 0;; ++outer) {
        const int budget = std::min(opt.max_centering_steps, opt.max_newton_steps - out.steps);
        if (budget <= 0) {
            out.exhausted = true;
            break;
        }
        const auto c = center(bar, z, t, opt, budget);
        out.steps += c.steps;
        out.kkt = std::max(c.kkt, m / t);
        if (trace) trace->push_back({outer, c.steps, t, bar.c.dot(z), out.kkt});
        if (stop && stop(z)) break;
        if (m / t <= opt.gap_tolerance) break;
        t = std::min(t * opt.barrier_growth, m / opt.gap_tolerance * (1.0 + 1e-9));
    }
    return out;
}

Barrier log_transform(const GpProblem& p) {
    const int n = p.num_variables();
    Barrier bar;
    bar.c = Eigen::VectorXd::Zero(n);
    for (const auto& [i, e] : p.objective.exponents) bar.c[i] += e;
    bar.lo.resize(n);
    bar.hi.resize(n);
    for (int i = 0; i < n; ++i) {
        bar.lo[i] = std::log(p.lower[i]);
        bar.hi[i] = std::log(p.upper[i]);
    }
    for (const auto& poly : p.constraints) {
        LseBlock blk;
        const auto T = static_cast<Eigen::Index>(poly.terms.size());
        blk.a = Eigen::MatrixXd::Zero(T, n);
        blk.b.resize(T);
        blk.g = Eigen::VectorXd::Zero(n);
        for (Eigen::Index r = 0; r < T; ++r) {
            blk.b[r] = std::log(poly.terms[r].coeff);
            for (const auto& [i, e] : poly.terms[r].exponents) blk.a(r, i) += e;
        }
        bar.blocks.push_back(std::move(blk));
    }
    return bar;
}

bool strictly_feasible(const Barrier& bar, const Eigen::VectorXd& z) {
    if (!bar.strictly_inside_box(z)) return false;
    for (const auto& blk : bar.blocks) {
        if (!(bar.block_value(blk, z, nullptr) < 0.0)) return false;
    }
    return true;
}

}  // namespace

GpResult solve_gp(const GpProblem& problem, const Eigen::VectorXd* start, const GpOptions& options) {
    problem.validate();
    const int n = problem.num_variables();
    const Barrier bar = log_transform(problem);
    GpResult result;
    std::vector<GpTraceRow>* trace = options.keep_trace ? &result.trace : nullptr;

    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    if (start) {
        if (start->size() != n) throw ContractError("solve_gp: start has the wrong dimension");
        for (int i = 0; i < n; ++i) y[i] = (*start)[i] > 0.0 ? std::log((*start)[i]) : 0.0;
    }
    for (int i = 0; i < n; ++i) {
        const double margin = std::min(1e-3, 0.25 * (bar.hi[i] - bar.lo[i]));
        y[i] = std::clamp(y[i], bar.lo[i] + margin, bar.hi[i] - margin);
    }

    if (!strictly_feasible(bar, y)) {
        // Phase I: minimize s subject to F_i(y) <= s.
        double s0 = 0.0;
        for (const auto& blk : bar.blocks) s0 = std::max(s0, bar.block_value(blk, y, nullptr));
        Barrier ph;
        ph.c = Eigen::VectorXd::Zero(n + 1);
        ph.c[n] = 1.0;
        ph.lo.resize(n + 1);
        ph.hi.resize(n + 1);
        ph.lo.head(n) = bar.lo;
        ph.hi.head(n) = bar.hi;
        ph.lo[n] = -1.0;
        ph.hi[n] = s0 + 2.0;
        for (const auto& blk : bar.blocks) {
            LseBlock b2;
            b2.a = Eigen::MatrixXd::Zero(blk.a.rows(), n + 1);
            b2.a.leftCols(n) = blk.a;
            b2.b = blk.b;
            b2.g = Eigen::VectorXd::Zero(n + 1);
            b2.g.head(n) = blk.g;
            b2.g[n] = -1.0;
            ph.blocks.push_back(std::move(b2));
        }
        Eigen::VectorXd z(n + 1);
        z.head(n) = y;
        z[n] = s0 + 1.0;
        const auto stop = [n](const Eigen::VectorXd& v) { return v[n] < -1e-3; };
        const auto o = run_barrier(ph, z, options, nullptr, stop);
        result.newton_steps += o.steps;
        if (!strictly_feasible(bar, z.head(n))) {
            result.status = o.exhausted ? GpStatus::iteration_limit : GpStatus::infeasible;
            result.x = z.head(n).array().exp();
            result.objective = problem.objective.eval(result.x);
            result.max_violation = problem.max_violation(result.x);
            return result;
        }
        y = z.head(n);
    }

    GpOptions main = options;
    main.max_newton_steps = std::max(1, options.max_newton_steps - result.newton_steps);
    const auto o = run_barrier(bar, y, main, trace, nullptr);
    result.newton_steps += o.steps;
    result.kkt_residual = o.kkt;
    result.x = y.array().exp();
    result.objective = problem.objective.eval(result.x);
    result.max_violation = problem.max_violation(result.x);
    result.status = o.exhausted ? GpStatus::iteration_limit : GpStatus::optimal;
    if (result.status == GpStatus::optimal) {
        const double edge = GpProblem::kImplicitLogBound - 1e-2;
        for (int i = 0; i < n; ++i) {
            const bool implicit_lo = bar.lo[i] <= -GpProblem::kImplicitLogBound + 1e-12;
            const bool implicit_hi = bar.hi[i] >= GpProblem::kImplicitLogBound - 1e-12;
            if ((implicit_lo && y[i] < -edge) || (implicit_hi && y[i] > edge)) result.status = GpStatus::unbounded;
        }
    }
    return result;
}

}  // namespace dmimo
