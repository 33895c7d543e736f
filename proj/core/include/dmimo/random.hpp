#pragma once

#include <cstdint>
#include <random>

#include "dmimo/common.hpp"

namespace dmimo {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

/// Independent generator for one trial/stream index. Results depend only on
/// (base, index), never on which thread consumes the stream.
Rng child_stream(std::uint64_t base, std::uint64_t index);

/// Draw a fresh 64-bit base seed from a parent generator.
std::uint64_t draw_seed(Rng& rng);

/// CN(0, 1): real and imaginary parts i.i.d. N(0, 1/2).
cplx complex_normal(Rng& rng);

/// Length-n vector of i.i.d. CN(0, variance) entries.
CVector complex_normal_vector(Rng& rng, Eigen::Index n, double variance = 1.0);

}  // namespace dmimo
