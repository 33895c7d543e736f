#include "dmimo/optimizer/sca.hpp"

#include <cmath>

#include "dmimo/common.hpp"

namespace dmimo {

double ScaCoefficients::surrogate(double chi) const {
    if (!(chi > 0.0)) throw DomainError("surrogate: chi must be > 0");
    return psi * std::log2(chi) + delta;
}

ScaCoefficients sca_coefficients(double chi_prev) {
    if (!(chi_prev > 0.0) || !std::isfinite(chi_prev)) throw DomainError("sca_coefficients: chi must be > 0");
    ScaCoefficients s;
    s.psi = chi_prev / (1.0 + chi_prev);
    s.delta = std::log2(1.0 + chi_prev) - s.psi * std::log2(chi_prev);
    return s;
}

double MonomialBound::eval(const std::vector<double>& w) const {
    if (w.size() != alpha.size()) throw ContractError("MonomialBound: size mismatch");
    double v = c;
    for (std::size_t i = 0; i < w.size(); ++i) v *= std::pow(w[i], 2.0 * alpha[i]);
    return v;
}

MonomialBound monomial_bound(const std::vector<double>& a, const std::vector<double>& anchor) {
    if (a.empty() || a.size() != anchor.size()) throw ContractError("monomial_bound: size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a[i] > 0.0) || !(anchor[i] > 0.0)) throw DomainError("monomial_bound: inputs must be > 0");
        total += a[i] * anchor[i];
    }
    MonomialBound b;
    b.c = total * total;
    for (std::size_t i = 0; i < a.size(); ++i) {
        b.alpha.push_back(a[i] * anchor[i] / total);
        b.c /= std::pow(anchor[i], 2.0 * b.alpha.back());
    }
    return b;
}

Monomial condense(const Posynomial& p, const Eigen::VectorXd& anchor) {
    if (p.terms.empty()) throw DomainError("condense: empty posynomial");
    std::vector<double> u;
    double total = 0.0;
    for (const auto& t : p.terms) {
        u.push_back(t.eval(anchor));
        total += u.back();
    }
    if (!(total > 0.0) || !std::isfinite(total)) throw DomainError("condense: posynomial must be positive at the anchor");
    Monomial out;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double theta = u[i] / total;
        if (theta <= 0.0) continue;
        Monomial piece = p.terms[i];
        piece.coeff /= theta;
        out.times(piece.power(theta));
    }
    return out;
}

}  // namespace dmimo
