#pragma once

// The probability measure on the matrix ball D_q = {v : v^* v < I} with
// density proportional to Delta(I - v v^*)^{mu - rho}, and the convolution
// of point masses it induces on the cone:
//
//   (delta_r * delta_s)(f) = E f( sqrt(r^2 + s^2 + s v r + r v^* s) ).

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "conebessel/cone_core.hpp"
#include "conebessel/random.hpp"
#include "conebessel/statistics.hpp"

namespace conebessel {

/// q x q matrix with spectral norm < 1.
class BallPoint {
 public:
  explicit BallPoint(SquareMatrix v);
  const SquareMatrix& matrix() const { return v_; }

 private:
  SquareMatrix v_;
};

/// Weighted sample on the cone with provenance.
struct EmpiricalMeasure {
  int q = 1;
  int d = 1;
  double mu = 0.0;
  std::vector<ConePoint> points;
  /// Normalised to sum 1.
  std::vector<double> weights;
  std::uint64_t seed = 0;
  /// Proposals drawn to produce the sample.
  std::uint64_t n_raw = 0;

  /// Uniform weights over the given points.
  static EmpiricalMeasure uniform(const HypergroupParams& p, std::vector<ConePoint> points,
                                  std::uint64_t seed);
  std::size_t size() const { return points.size(); }
};

/// CSV: a '#' metadata line, a column header, then one row per point with
/// the entries row-major (d components each) followed by the weight.
void write_csv(std::ostream& out, const EmpiricalMeasure& m);
EmpiricalMeasure read_csv(std::istream& in);

/// Exact draw: v = X (X^* X + B)^{-1/2} with X Gaussian and B Wishart of
/// shape mu - qd/2. Valid for every mu > rho - 1.
BallPoint sample_ball(const HypergroupParams& p, Rng& rng);

/// Rejection from uniform proposals on [-1,1]^{dq^2}; needs mu >= rho so the
/// density is bounded by 1. Throws ConvergenceError after max_proposals.
BallPoint sample_ball_rejection(const HypergroupParams& p, Rng& rng,
                                std::uint64_t max_proposals = 100'000'000);

/// kappa_mu = int_D Delta(I - v^* v)^{mu - rho} dv by uniform proposals on
/// the bounding box.
Estimate kappa(const HypergroupParams& p, std::size_t n_samples, Rng& rng);

/// pi^{dq^2/2} Gamma_Omega(mu - qd/2) / Gamma_Omega(mu).
double kappa_closed(const HypergroupParams& p);

struct BochnerEstimate {
  Estimate real;
  Estimate imag;
  /// |imag| <= 3 stderr (the exact value is real).
  bool imaginary_consistent() const;
};

/// Monte Carlo of E exp(-i (r v | s)) over the ball measure.
BochnerEstimate phi_bochner(const HypergroupParams& p, const ConePoint& s, const ConePoint& r,
                            std::size_t n_samples, Rng& rng);

/// sqrt(r^2 + s^2 + s v r + r v^* s) for a given ball point.
ConePoint conv_point(const ConePoint& r, const ConePoint& s, const BallPoint& v);

/// One draw from delta_r * delta_s.
ConePoint conv_sample(const HypergroupParams& p, const ConePoint& r, const ConePoint& s, Rng& rng);

Estimate conv_expect(const HypergroupParams& p, const std::function<double(const ConePoint&)>& f,
                     const ConePoint& r, const ConePoint& s, std::size_t n_samples, Rng& rng);

/// (1-c) r <= z <= (1+c) r in the Loewner order, up to tol.
bool support_window_check(const HypergroupParams& p, const ConePoint& r, double c, const ConePoint& z,
                          double tol);

inline constexpr double kSupportSlack = 1e-9;

/// Process-wide count of convolution draws and of draws violating
/// ||z|| <= ||r|| + ||s|| + kSupportSlack.
struct SupportAudit {
  std::uint64_t samples = 0;
  std::uint64_t violations = 0;
  double worst_excess = 0.0;
};
SupportAudit support_audit();
void reset_support_audit();

}  // namespace conebessel
