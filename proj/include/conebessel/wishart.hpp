#pragma once

// Squared Wishart laws W(s^2) on Pi_q: images of classical Wishart laws
// under the matrix square root.

#include <vector>

#include "conebessel/ball_measure.hpp"
#include "conebessel/cone_core.hpp"
#include "conebessel/hypergroup_algebra.hpp"
#include "conebessel/random.hpp"

namespace conebessel {

struct WishartSpec {
  HypergroupParams params;
  /// Covariance s^2; may be singular.
  ConePoint scale_sq;
  /// The law is W(t scale_sq).
  double t = 1.0;
};

/// sqrt(T T^*) with T the Bartlett factor of shape mu. Needs
/// mu > (d/2)(q-1) only.
ConePoint sample_standard(const HypergroupParams& p, Rng& rng);

/// T_a(standard draw) with a = sqrt(t scale_sq).
ConePoint sample_scaled(const WishartSpec& spec, Rng& rng);

/// omega_mu-density of W(s^2), s = sqrt(t scale_sq) regular:
/// Delta(s^2)^{-mu} (2 pi)^{-q mu} exp(-tr(s^{-1} r^2 s^{-1}) / 2).
double density(const WishartSpec& spec, const ConePoint& r);

/// exp(-tr(cov s^2) / 2).
double fourier_closed(const HypergroupParams& p, const ConePoint& cov, const ConePoint& s);

/// omega_mu-density at y of delta_x * W(s^2), s regular.
double translated_density(const HypergroupParams& p, const ConePoint& x, const ConePoint& s,
                          const ConePoint& y);

struct SemigroupReport {
  FourierPanel panel;
};

/// X ~ W(a2), Y ~ W(b2), Z = conv_sample(X, Y); Fourier panel of Z against
/// W(a2 + b2).
SemigroupReport semigroup_check(const HypergroupParams& p, const ConePoint& a2, const ConePoint& b2,
                                std::size_t n, Rng& rng, const std::vector<ConePoint>& s_grid);

}  // namespace conebessel
