#pragma once

#include <cstdint>
#include <random>

#include "ksphere/operator_space.hpp"

namespace ksphere {

using Rng = std::mt19937_64;

/// Entries with real and imaginary parts drawn from N(0, 1), then made
/// Hermitian as (M + M^dagger) / 2.
HermitianMatrix random_hermitian(int dim, Rng& rng);

/// Random Hermitian operator with the trace removed.
OperatorState random_traceless_hermitian(int dim, Rng& rng);

/// Random non-negative chain b_n in [lo, hi).
std::vector<double> random_coefficients(int count, Rng& rng, double lo = 0.2, double hi = 2.0);

}  // namespace ksphere
