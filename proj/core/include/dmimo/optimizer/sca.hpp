#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dmimo/optimizer/gp.hpp"

namespace dmimo {

struct ScaCoefficients {
    double psi = 0.0;
    double delta = 0.0;

    /// ψ log2 χ + δ, a global under-estimator of log2(1 + χ).
    double surrogate(double chi) const;
};

/// Tangent of log2(1 + χ) in log χ at χ_prev.
ScaCoefficients sca_coefficients(double chi_prev);

struct MonomialBound {
    double c = 0.0;
    std::vector<double> alpha;  // sums to 1

    /// c Π w^{2α}.
    double eval(const std::vector<double>& w) const;
};

/// Lower bound of (Σ w A)² by a monomial in w that is exact at w = anchor.
MonomialBound monomial_bound(const std::vector<double>& a, const std::vector<double>& anchor);

/// Arithmetic-geometric condensation of a posynomial at x̂: Π (u_i/θ_i)^{θ_i}, θ_i = u_i(x̂)/Σu(x̂).
Monomial condense(const Posynomial& p, const Eigen::VectorXd& anchor);

}  // namespace dmimo
