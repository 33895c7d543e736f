#include "dmimo/random.hpp"

#include <cmath>

namespace dmimo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(splitmix64(base) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

Rng child_stream(std::uint64_t base, std::uint64_t index) { return Rng(mix_seed(base, index)); }

std::uint64_t draw_seed(Rng& rng) { return rng(); }

cplx complex_normal(Rng& rng) {
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    const double re = gauss(rng);
    const double im = gauss(rng);
    return {re, im};
}

CVector complex_normal_vector(Rng& rng, Eigen::Index n, double variance) {
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5 * variance));
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v[i] = cplx(re, im);
    }
    return v;
}

}  // namespace dmimo
