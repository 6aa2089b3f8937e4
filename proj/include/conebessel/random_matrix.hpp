#pragma once

// Random test inputs over F = R or C.

#include "conebessel/cone_core.hpp"
#include "conebessel/random.hpp"

namespace conebessel {

/// Entries with iid standard normal real components.
SquareMatrix gaussian_matrix(int q, int d, Rng& rng);

/// (g + g^*) / 2 for a Gaussian g, times scale.
HermitianMatrix random_hermitian(int q, int d, Rng& rng, double scale = 1.0);

/// scale * g g^* / q for a Gaussian g; almost surely positive definite.
ConePoint random_cone_point(int q, int d, Rng& rng, double scale = 1.0);

/// Haar-ish unitary: eigenbasis of a random Hermitian matrix with random
/// column phases.
SquareMatrix random_unitary(int q, int d, Rng& rng);

}  // namespace conebessel

namespace conebessel {

/// Bartlett factor T: lower triangular, t_jj^2 ~ Gamma(shape - (d/2)(j-1), 2),
/// strictly lower entries with standard normal components. T T^* is Wishart
/// with density proportional to Delta(w)^{shape - n/q} e^{-tr(w)/2}.
SquareMatrix bartlett_factor(int q, int d, double shape, Rng& rng);

}  // namespace conebessel
