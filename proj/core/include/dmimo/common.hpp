#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dmimo {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid or inconsistent configuration input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller violated an operation precondition (e.g. user not scheduled).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Input degenerates to a case where the quantity is undefined.
class DegenerateError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An optimization stage could not meet its constraints.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(std::string stage, const std::string& what, double slack = 0.0)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), slack_(slack) {}

    const std::string& stage() const noexcept { return stage_; }
    /// Feasibility slack reported by the stage (phi < 1 means infeasible).
    double slack() const noexcept { return slack_; }

private:
    std::string stage_;
    double slack_;
};

/// Stand-in for an infinite Rician factor (pure line-of-sight).
inline constexpr double kRicianCap = 1e12;

}  // namespace dmimo
