#pragma once

// Jack/zonal polynomials at eigenvalue vectors and the matrix Bessel series
//
//   J_mu(x) = sum_lambda (-1)^|lambda| / ((mu)_lambda |lambda|!) Z_lambda(x),
//
// with Z_lambda = C_lambda^{2/d} normalised so that
// sum_{|lambda| = k} Z_lambda(x) = (tr x)^k.

#include <span>
#include <vector>

#include "conebessel/cone_core.hpp"
#include "conebessel/partition.hpp"

namespace conebessel {

/// Raised when the series would need more than kSeriesCap layers.
class SeriesCapError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kSeriesCap = 60;

struct BesselEval {
  double value = 0.0;
  /// Bound on the absolute value of the dropped tail.
  double truncation_bound = 0.0;
  /// Largest |lambda| included.
  int degree_used = 0;
  /// eps times the sum of absolute term values; the series alternates and
  /// loses this much to cancellation for large arguments.
  double rounding_estimate = 0.0;
};

/// C_lambda^alpha(xi); needs lam.length() <= xi.size().
double jack_C(const Partition& lam, double alpha, std::span<const double> xi);

/// All C_lambda^alpha(xi) with |lambda| = k and at most xi.size() parts,
/// in the order of partitions(k, xi.size()).
std::vector<double> jack_C_layer(int k, double alpha, std::span<const double> xi);

/// Z_lambda(x) = C_lambda^{2/d}(eigenvalues of x).
double zonal_Z(const HypergroupParams& p, const Partition& lam, const HermitianMatrix& x);

/// Truncated J_mu(x). x may be any Hermitian matrix (the series is entire).
/// Requires mu > (d/2)(q-1) so every Pochhammer factor is positive.
/// Throws SeriesCapError if target_tol needs more than kSeriesCap layers.
BesselEval bessel_J(const HypergroupParams& p, double mu, const HermitianMatrix& x,
                    double target_tol);

/// Same series evaluated directly on an eigenvalue vector; q = xi.size().
BesselEval bessel_J_spectrum(int d, double mu, std::span<const double> xi, double target_tol);

inline constexpr double kCharacterTolerance = 1e-12;

/// phi_s(r) = J_mu(s r^2 s / 4) with mu = p.mu().
double character_phi(const HypergroupParams& p, const ConePoint& s, const ConePoint& r,
                     double target_tol = kCharacterTolerance);

/// phi_s(r) for an arbitrary Hermitian s (used for derivatives at s = 0).
double character_phi_hermitian(const HypergroupParams& p, const HermitianMatrix& s,
                               const ConePoint& r, double target_tol = kCharacterTolerance);

}  // namespace conebessel
