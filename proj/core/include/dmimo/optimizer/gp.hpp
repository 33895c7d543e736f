#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dmimo {

/// c * prod x_i^{e_i}, sparse exponents.
struct Monomial {
    double coeff = 1.0;
    std::vector<std::pair<int, double>> exponents;

    double eval(const Eigen::VectorXd& x) const;
    double log_eval(const Eigen::VectorXd& log_x) const;
    Monomial& times(const Monomial& other);
    Monomial& power(double e);
    double exponent_of(int variable) const;
};

struct Posynomial {
    std::vector<Monomial> terms;

    double eval(const Eigen::VectorXd& x) const;
};

/// minimize objective(x) s.t. every constraint(x) <= 1 and lower <= x <= upper, x > 0.
struct GpProblem {
    Monomial objective;
    std::vector<Posynomial> constraints;
    std::vector<double> lower;
    std::vector<double> upper;

    static constexpr double kImplicitLogBound = 50.0;

    int num_variables() const { return static_cast<int>(lower.size()); }
    /// Bounds default to the implicit box exp(±50).
    int add_variable(double lo = 0.0, double hi = 0.0);
    void validate() const;
    /// Largest relative violation over constraints and bounds, in the linear domain.
    double max_violation(const Eigen::VectorXd& x) const;
};

enum class GpStatus { optimal, infeasible, iteration_limit, unbounded };

std::string to_string(GpStatus status);

struct GpOptions {
    double gap_tolerance = 1e-8;    // m / t at exit
    double newton_tolerance = 1e-12;  // λ²/2
    double barrier_growth = 20.0;
    int max_newton_steps = 2000;
    int max_centering_steps = 200;
    bool keep_trace = false;
};

struct GpTraceRow {
    int outer = 0;
    int newton_steps = 0;
    double t = 0.0;
    double objective = 0.0;  // log objective
    double kkt_residual = 0.0;
};

struct GpResult {
    GpStatus status = GpStatus::iteration_limit;
    Eigen::VectorXd x;       // linear domain
    double objective = 0.0;  // objective(x)
    double kkt_residual = 0.0;
    double max_violation = 0.0;
    int newton_steps = 0;
    std::vector<GpTraceRow> trace;
};

/// Barrier method on the log-transformed problem, preceded by a phase I search when `start`
/// is absent or not strictly feasible.
GpResult solve_gp(const GpProblem& problem, const Eigen::VectorXd* start = nullptr, const GpOptions& options = {});

}  // namespace dmimo
