#include "conebessel/wishart.hpp"

#include <cmath>
#include <numbers>

#include "conebessel/jack_series.hpp"
#include "conebessel/random_matrix.hpp"

namespace conebessel {

namespace {

void check_spec(const WishartSpec& spec) {
  const auto& p = spec.params;
  if (spec.scale_sq.q() != p.q() || spec.scale_sq.d() != p.d()) throw DomainError("wishart: scale shape mismatch");
  if (!(spec.t >= 0.0)) throw DomainError("wishart: t must be nonnegative");
}

struct RegularScale {
  HermitianMatrix inv_sq;  ///< (s^2)^{-1}
  double log_det_sq = 0.0;  ///< log Delta(s^2)
};

RegularScale regular_scale(const HermitianMatrix& s_sq) {
  const HermitianEigen e = eig_herm(s_sq);
  const double top = e.values(e.values.size() - 1);
  if (!(e.values(0) > 1e-12 * top) || !(top > 0.0)) {
    throw DomainError("wishart: covariance is singular; evaluate the density on the subhypergroup instead");
  }
  RegularScale out{spectral_apply(e, [](double l) { return 1.0 / l; }), 0.0};
  for (int i = 0; i < e.values.size(); ++i) out.log_det_sq += std::log(e.values(i));
  return out;
}

double log_normaliser(const HypergroupParams& p, double log_det_sq) {
  return -p.mu() * log_det_sq - p.q() * p.mu() * std::log(2.0 * std::numbers::pi);
}

}  // namespace

ConePoint sample_standard(const HypergroupParams& p, Rng& rng) {
  const SquareMatrix t = bartlett_factor(p.q(), p.d(), p.mu(), rng);
  return psd_sqrt(HermitianMatrix::gram(t));
}

ConePoint sample_scaled(const WishartSpec& spec, Rng& rng) {
  check_spec(spec);
  const auto& p = spec.params;
  const SquareMatrix t = bartlett_factor(p.q(), p.d(), p.mu(), rng);
  // T_a(r) with r^2 = T T^*, a = sqrt(t scale_sq)
  const ConePoint a = psd_sqrt(spec.t * spec.scale_sq.hermitian());
  return psd_sqrt(HermitianMatrix::gram(SquareMatrix(t.d(), a.data() * t.data())));
}

double density(const WishartSpec& spec, const ConePoint& r) {
  check_spec(spec);
  const auto& p = spec.params;
  if (r.q() != p.q() || r.d() != p.d()) throw DomainError("wishart density: shape mismatch");
  if (!(spec.t > 0.0)) throw DomainError("wishart density: t must be positive");
  const RegularScale s = regular_scale(spec.t * spec.scale_sq.hermitian());
  const double quad = (r.squared().data() * s.inv_sq.data()).trace().real();
  return std::exp(log_normaliser(p, s.log_det_sq) - 0.5 * quad);
}

double fourier_closed(const HypergroupParams& p, const ConePoint& cov, const ConePoint& s) {
  if (cov.q() != p.q() || s.q() != p.q()) throw DomainError("fourier_closed: shape mismatch");
  return std::exp(-0.5 * (cov.data() * s.squared().data()).trace().real());
}

double translated_density(const HypergroupParams& p, const ConePoint& x, const ConePoint& s,
                          const ConePoint& y) {
  if (x.q() != p.q() || s.q() != p.q() || y.q() != p.q()) throw DomainError("translated_density: shape mismatch");
  const RegularScale scale = regular_scale(s.squared());
  const HermitianEigen es = eig_herm(s);
  const HermitianMatrix s_inv = spectral_apply(es, [](double l) { return 1.0 / l; });
  // M = s^{-1} y^2 s^{-1}; x^2 M has the spectrum of the Hermitian x M x
  const HermitianMatrix m = HermitianMatrix::congruence(s_inv.matrix(), y.squared());
  const HermitianMatrix arg = -0.25 * HermitianMatrix::congruence(x.hermitian().matrix(), m);
  const double exponent = -0.5 * (x.squared().trace() + m.trace());
  BesselEval j;
  try {
    // the argument is negative semidefinite, so J >= 1; a relative tolerance suffices
    const BesselEval rough = bessel_J(p, p.mu(), arg, 1e-6);
    j = bessel_J(p, p.mu(), arg, 1e-13 * std::max(1.0, std::abs(rough.value)));
  } catch (const SeriesCapError& e) {
    // For a negative semidefinite argument J <= 0F1(1/2; sum xi) <= exp(2 sqrt(sum xi))
    // in the hypergroup range; report an honest zero only if even that underflows.
    const HermitianEigen ea = eig_herm(arg);
    double sum = 0.0;
    for (int i = 0; i < ea.values.size(); ++i) sum += std::abs(ea.values(i));
    const double log_upper = log_normaliser(p, scale.log_det_sq) + exponent + 2.0 * std::sqrt(sum);
    if (p.is_hypergroup_index() && log_upper < -745.0) return 0.0;
    throw SeriesCapError(std::string("translated_density: ") + e.what() + "; reduce ||x|| or ||y||");
  }
  return std::exp(log_normaliser(p, scale.log_det_sq) + exponent) * j.value;
}

SemigroupReport semigroup_check(const HypergroupParams& p, const ConePoint& a2, const ConePoint& b2,
                                std::size_t n, Rng& rng, const std::vector<ConePoint>& s_grid) {
  p.require_hypergroup();
  const WishartSpec wa{p, a2, 1.0};
  const WishartSpec wb{p, b2, 1.0};
  std::vector<ConePoint> z;
  z.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const ConePoint x = sample_scaled(wa, rng);
    const ConePoint y = sample_scaled(wb, rng);
    z.push_back(conv_sample(p, x, y, rng));
  }
  const ConePoint sum(a2.hermitian() + b2.hermitian());
  std::vector<double> target;
  for (const ConePoint& s : s_grid) target.push_back(fourier_closed(p, sum, s));
  return {fourier_panel(p, EmpiricalMeasure::uniform(p, std::move(z), 0), s_grid, target)};
}

}  // namespace conebessel
