#include "conebessel/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "conebessel/ball_measure.hpp"
#include "conebessel/hypergroup_algebra.hpp"
#include "conebessel/jack_series.hpp"
#include "conebessel/random_matrix.hpp"
#include "conebessel/randwalk_limits.hpp"
#include "conebessel/statistics.hpp"
#include "conebessel/wishart.hpp"

namespace conebessel {

namespace {

using Json = nlohmann::json;

struct Ctx {
  const CheckOptions& opts;
  std::uint64_t seed;
  ReplicaRunner runner;

  std::size_t budget(double n) const {
    return static_cast<std::size_t>(std::max(50.0, std::round(n * opts.sample_scale)));
  }
  bool restricted() const { return opts.only.has_value(); }
  const HypergroupParams& only() const { return *opts.only; }
};

struct Outcome {
  bool passed = false;
  std::string detail;
  Json data = Json::object();
  bool skipped = false;
};

Outcome skip(std::string why) { return {true, std::move(why), Json::object(), true}; }

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

HypergroupParams above_rho(int q, int d, double shift) {
  const double rho = d * (q - 0.5) + 1.0;
  return HypergroupParams(q, d, rho + shift);
}

/// The restricted parameter set when given, otherwise `sweep`.
std::vector<HypergroupParams> configs(const Ctx& c, std::vector<HypergroupParams> sweep) {
  if (c.restricted()) return {c.only()};
  return sweep;
}

HypergroupParams random_config(Rng& rng, int q_max) {
  const int q = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(q_max)));
  const int d = 1 + static_cast<int>(rng.index(2));
  const double rho = d * (q - 0.5) + 1.0;
  return HypergroupParams(q, d, rho - 1.0 + 0.2 + 2.8 * rng.uniform());
}

/// Random direction in the cone rescaled to Frobenius norm `norm`.
ConePoint cone_point_with_norm(int q, int d, Rng& rng, double norm) {
  const ConePoint x = random_cone_point(q, d, rng, 1.0);
  return ConePoint((norm / x.norm()) * x.hermitian());
}

std::vector<double> spectrum(const HermitianMatrix& x) {
  const HermitianEigen e = eig_herm(x);
  return {e.values.data(), e.values.data() + e.values.size()};
}

// 1 --------------------------------------------------------------------------
Outcome trace_identity(const Ctx& c) {
  std::vector<std::pair<int, int>> qd;
  if (c.restricted()) {
    qd.emplace_back(c.only().q(), c.only().d());
  } else {
    for (int q = 1; q <= 3; ++q)
      for (int d = 1; d <= 2; ++d) qd.emplace_back(q, d);
  }
  Rng rng(c.seed);
  double worst = 0.0;
  int evaluations = 0;
  for (auto [q, d] : qd) {
    for (int t = 0; t < 200; ++t) {
      // relative error needs |tr x| away from 0
      HermitianMatrix x = random_hermitian(q, d, rng, 1.0);
      while (std::abs(x.trace()) < 0.1 * x.norm()) x = random_hermitian(q, d, rng, 1.0);
      const double tr = x.trace();
      const auto xi = spectrum(x);
      for (int k = 0; k <= 6; ++k) {
        const auto layer = jack_C_layer(k, 2.0 / d, xi);
        const double sum = std::accumulate(layer.begin(), layer.end(), 0.0);
        const double expected = std::pow(tr, k);
        worst = std::max(worst, std::abs(sum - expected) / std::abs(expected));
        ++evaluations;
      }
    }
  }
  return {worst <= 1e-8, fmt("max relative error %.2e over %g evaluations", worst, evaluations),
          {{"max_relative_error", worst}, {"evaluations", evaluations}}};
}

// 2 --------------------------------------------------------------------------
Outcome rank_one(const Ctx& c) {
  Rng rng(c.seed);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const HypergroupParams p = c.restricted() ? c.only() : random_config(rng, 3);
    const int q = p.q();
    const int d = p.d();
    const double x = 10.0 * rng.uniform();
    const ConePoint r = random_cone_point(q, d, rng, 1.0);
    // s = c e e^* with ||r e|| c = x, so s r^2 s has the single eigenvalue x^2
    const MatrixStorage e = random_unitary(q, d, rng).data().col(0);
    const double scale = x / (r.data() * e).norm();
    const ConePoint s(hermitian_from_storage(d, scale * e * e.adjoint()));
    const double got = character_phi(p, s, r, 1e-13);
    const double nu = p.mu() - 1.0;
    const double oracle =
        x == 0.0 ? 1.0 : std::tgamma(p.mu()) * std::pow(x / 2.0, -nu) * boost::math::cyl_bessel_j(nu, x);
    worst = std::max(worst, std::abs(got - oracle));
  }
  return {worst <= 1e-10, fmt("max |phi - 0F1| = %.2e over 500 pairs", worst), {{"max_abs_error", worst}}};
}

// 3 --------------------------------------------------------------------------
Outcome bochner(const Ctx& c) {
  const std::size_t triples = 300;
  const std::size_t n = c.budget(1e5);
  std::vector<double> z(triples), zi(triples);
  c.runner.run(triples, c.seed, [&](std::size_t i, Rng& rng) {
    const HypergroupParams p = c.restricted() ? c.only() : random_config(rng, 3);
    const ConePoint s = cone_point_with_norm(p.q(), p.d(), rng, 0.3 + 2.7 * rng.uniform());
    const ConePoint r = cone_point_with_norm(p.q(), p.d(), rng, 0.3 + 2.7 * rng.uniform());
    const BochnerEstimate b = phi_bochner(p, s, r, n, rng);
    const double series = character_phi(p, s, r);
    const double se = std::hypot(b.real.std_error, kCharacterTolerance);
    z[i] = std::abs(b.real.value - series) / se;
    zi[i] = b.imag.std_error > 0 ? std::abs(b.imag.value) / b.imag.std_error : 0.0;
  });
  const auto agree = std::count_if(z.begin(), z.end(), [](double v) { return v <= 3.0; });
  const auto imag_ok = std::count_if(zi.begin(), zi.end(), [](double v) { return v <= 3.0; });
  const double frac = static_cast<double>(agree) / triples;
  return {frac >= 0.99,
          fmt("%.0f/300 triples within 3 se (max z %.2f); imaginary part within 3 se on %.0f/300",
              static_cast<double>(agree), *std::max_element(z.begin(), z.end()), static_cast<double>(imag_ok)),
          {{"fraction", frac}, {"z", z}, {"samples", n}}};
}

// 4 --------------------------------------------------------------------------
Outcome product_formula(const Ctx& c) {
  std::vector<HypergroupParams> sweep;
  for (int q = 1; q <= 2; ++q) {
    for (int d = 1; d <= 2; ++d) {
      const double rho = d * (q - 0.5) + 1.0;
      sweep.emplace_back(q, d, rho + 0.5);
      sweep.emplace_back(q, d, 2.0 * rho);
    }
  }
  const auto ps = configs(c, sweep);
  const std::size_t n = c.budget(2e4);
  const std::size_t cells = ps.size() * 27;
  std::vector<double> z(cells);
  c.runner.run(cells, c.seed, [&](std::size_t i, Rng& rng) {
    const HypergroupParams& p = ps[i / 27];
    const int cell = static_cast<int>(i % 27);
    const double scales[3] = {0.3, 0.7, 1.2};
    const double t_scales[3] = {0.3, 0.6, 1.0};
    const ConePoint r = cone_point_with_norm(p.q(), p.d(), rng, scales[cell / 9]);
    const ConePoint s = cone_point_with_norm(p.q(), p.d(), rng, scales[(cell / 3) % 3]);
    const ConePoint t = cone_point_with_norm(p.q(), p.d(), rng, t_scales[cell % 3]);
    const Estimate e = conv_expect(p, [&](const ConePoint& x) { return character_phi(p, t, x, 1e-10); }, r, s, n, rng);
    z[i] = one_sample_z(e, character_phi(p, t, r) * character_phi(p, t, s));
  });
  const double worst = *std::max_element(z.begin(), z.end());
  const auto within = std::count_if(z.begin(), z.end(), [](double v) { return v <= 3.0; });
  return {worst <= 3.0,
          fmt("%.0f/%.0f cells within 3 se, max z %.2f", static_cast<double>(within), static_cast<double>(cells), worst),
          {{"z", z}, {"samples", n}}};
}

// 5 --------------------------------------------------------------------------
Outcome support_lemma(const Ctx& c) {
  const auto ps = configs(c, {above_rho(2, 1, 0.5), above_rho(2, 2, 0.5), above_rho(3, 1, 0.5), above_rho(3, 2, 0.5)});
  const std::size_t n = c.budget(1e5);
  const std::size_t jobs = ps.size() * 4;
  std::vector<std::size_t> failures(jobs);
  c.runner.run(jobs, c.seed, [&](std::size_t i, Rng& rng) {
    const HypergroupParams& p = ps[i / 4];
    const double cc = (i % 2) == 0 ? 0.3 : 1.0;
    const bool deficient = (i / 2) % 2 == 1;
    ConePoint r = random_cone_point(p.q(), p.d(), rng, 1.0);
    if (deficient) {
      const HermitianEigen e = eig_herm(r);
      r = ConePoint(spectral_apply(e, [&, k = 0](double l) mutable { return k++ == 0 ? 0.0 : l; }));
    }
    const ConePoint cr(cc * r.hermitian());
    for (std::size_t k = 0; k < n; ++k) {
      if (!support_window_check(p, r, cc, conv_sample(p, r, cr, rng), 1e-8)) ++failures[i];
    }
  });
  const std::size_t total = std::accumulate(failures.begin(), failures.end(), std::size_t{0});
  return {total == 0,
          fmt("%.0f of %.0f samples outside the window", static_cast<double>(total), static_cast<double>(jobs * n)),
          {{"failures", failures}, {"samples_per_case", n}}};
}

// 6 --------------------------------------------------------------------------
Outcome norm_bound(const Ctx& c) {
  const std::size_t n = c.budget(1e5);
  Rng rng(c.seed);
  for (std::size_t k = 0; k < n; ++k) {
    const HypergroupParams p = c.restricted() ? c.only() : random_config(rng, 3);
    const ConePoint r = random_cone_point(p.q(), p.d(), rng, 0.1 + 3.0 * rng.uniform());
    const ConePoint s = random_cone_point(p.q(), p.d(), rng, 0.1 + 3.0 * rng.uniform());
    conv_sample(p, r, s, rng);
  }
  const SupportAudit a = support_audit();
  char buf[160];
  std::snprintf(buf, sizeof buf, "%llu violations in %llu convolution samples (worst excess %.2e)",
                static_cast<unsigned long long>(a.violations), static_cast<unsigned long long>(a.samples),
                a.worst_excess);
  return {a.violations == 0 && a.samples > 0, buf,
          {{"samples", a.samples}, {"violations", a.violations}, {"worst_excess", a.worst_excess}}};
}

// 7 --------------------------------------------------------------------------
Outcome automorphism(const Ctx& c) {
  const auto ps = configs(c, {above_rho(2, 1, 0.5), above_rho(2, 2, 0.5), above_rho(3, 1, 0.5),
                              above_rho(3, 2, 0.5), above_rho(2, 2, 1.5)});
  const std::size_t n = c.budget(2e4);
  std::vector<double> z(5);
  c.runner.run(5, c.seed, [&](std::size_t i, Rng& rng) {
    const HypergroupParams& p = ps[i % ps.size()];
    const int q = p.q();
    const int d = p.d();
    SquareMatrix a = 0.6 * gaussian_matrix(q, d, rng);
    while (!Automorphism(a).invertible()) a = 0.6 * gaussian_matrix(q, d, rng);
    const Automorphism t(a);
    const ConePoint x = cone_point_with_norm(q, d, rng, 0.6);
    const ConePoint y = cone_point_with_norm(q, d, rng, 0.6);
    const ConePoint tx = automorphism_apply(t, x);
    const ConePoint ty = automorphism_apply(t, y);
    std::vector<ConePoint> lhs, rhs;
    for (std::size_t k = 0; k < n; ++k) {
      lhs.push_back(automorphism_apply(t, conv_sample(p, x, y, rng)));
      rhs.push_back(conv_sample(p, tx, ty, rng));
    }
    const auto grid = default_s_grid(q, d, 5, 0.6);
    const auto ml = EmpiricalMeasure::uniform(p, std::move(lhs), 0);
    const auto mr = EmpiricalMeasure::uniform(p, std::move(rhs), 0);
    for (const ConePoint& s : grid) {
      z[i] = std::max(z[i], std::abs(two_sample_z(fourier_empirical(p, ml, s), fourier_empirical(p, mr, s))));
    }
  });
  const double worst = *std::max_element(z.begin(), z.end());
  return {worst <= 3.0, fmt("max two-sample z %.2f over 5 matrices a", worst), {{"z", z}, {"samples", n}}};
}

// 8 --------------------------------------------------------------------------
Outcome restriction(const Ctx& c) {
  std::vector<HypergroupParams> ps;
  if (c.restricted()) {
    if (c.only().q() < 2) return skip("needs q >= 2");
    ps.push_back(c.only());
  } else {
    ps = {above_rho(3, 1, 0.3), above_rho(3, 2, 0.3)};
  }
  Rng rng(c.seed);
  double worst = 0.0;
  for (const auto& p : ps) {
    for (int k = 1; k < p.q(); ++k) {
      const HypergroupParams small(k, p.d(), p.mu());
      for (int t = 0; t < 100; ++t) {
        const HermitianMatrix r = random_hermitian(k, p.d(), rng, 1.5);
        MatrixStorage big = MatrixStorage::Zero(p.q(), p.q());
        big.topLeftCorner(k, k) = r.data();
        const double full = bessel_J(p, p.mu(), hermitian_from_storage(p.d(), big), 1e-13).value;
        const double part = bessel_J(small, p.mu(), r, 1e-13).value;
        worst = std::max(worst, std::abs(full - part));
      }
    }
  }
  return {worst <= 1e-9, fmt("max |J^q(blockdiag(r,0)) - J^k(r)| = %.2e", worst), {{"max_abs_error", worst}}};
}

// 9 --------------------------------------------------------------------------
Outcome wishart_fourier(const Ctx& c) {
  std::vector<HypergroupParams> ps;
  if (c.restricted()) {
    ps.push_back(c.only());
  } else {
    ps = {above_rho(2, 1, 0.5), above_rho(2, 2, 0.5)};
  }
  const std::size_t n = c.budget(1e5);
  const std::size_t jobs = ps.size() * 3;
  std::vector<double> z(jobs), dev(jobs);
  c.runner.run(jobs, c.seed, [&](std::size_t i, Rng& rng) {
    const HypergroupParams& p = ps[i / 3];
    const int q = p.q();
    const int d = p.d();
    ConePoint cov = ConePoint::identity(q, d);
    if (i % 3 == 1) cov = random_cone_point(q, d, rng, 1.0);
    if (i % 3 == 2) {
      const SquareMatrix g = gaussian_matrix(q, d, rng);
      cov = ConePoint(hermitian_from_storage(d, g.data().col(0) * g.data().col(0).adjoint() / q));
    }
    std::vector<ConePoint> pts;
    pts.reserve(n);
    for (std::size_t k = 0; k < n; ++k) pts.push_back(sample_scaled({p, cov, 1.0}, rng));
    const auto grid = default_s_grid(q, d, 10, 1.0);
    std::vector<double> target;
    for (const auto& s : grid) target.push_back(fourier_closed(p, cov, s));
    const FourierPanel panel = fourier_panel(p, EmpiricalMeasure::uniform(p, std::move(pts), 0), grid, target);
    z[i] = panel.max_z;
    dev[i] = panel.max_abs_deviation;
  });
  const double worst = *std::max_element(z.begin(), z.end());
  return {worst <= 3.0, fmt("max z %.2f over %g covariances x 10 grid points", worst, static_cast<double>(jobs)),
          {{"z", z}, {"max_abs_deviation", dev}, {"samples", n}}};
}

// 10 -------------------------------------------------------------------------
Outcome wishart_semigroup(const Ctx& c) {
  const auto ps = configs(c, {above_rho(2, 1, 0.5), above_rho(2, 2, 0.5)});
  const std::size_t n = c.budget(1e5);
  std::vector<double> z(ps.size());
  c.runner.run(ps.size(), c.seed, [&](std::size_t i, Rng& rng) {
    const HypergroupParams& p = ps[i];
    const ConePoint a2 = cone_point_with_norm(p.q(), p.d(), rng, 0.8);
    const ConePoint b2 = cone_point_with_norm(p.q(), p.d(), rng, 0.8);
    z[i] = semigroup_check(p, a2, b2, n, rng, default_s_grid(p.q(), p.d(), 6, 1.0)).panel.max_z;
  });
  const double worst = *std::max_element(z.begin(), z.end());
  return {worst <= 3.0, fmt("max z %.2f", worst), {{"z", z}, {"samples", n}}};
}

// 11 -------------------------------------------------------------------------
Outcome bartlett_vs_gaussian(const Ctx& c) {
  struct Case {
    int q, d, dof;
  };
  std::vector<Case> cases;
  if (c.restricted()) {
    const auto& p = c.only();
    const double dof = 2.0 * p.mu() / p.d();
    if (std::abs(dof - std::round(dof)) > 1e-12 || dof <= p.q() - 1) {
      return skip("needs integer 2 mu / d > q - 1");
    }
    cases.push_back({p.q(), p.d(), static_cast<int>(std::round(dof))});
  } else {
    for (int q : {2, 3})
      for (int d : {1, 2})
        for (int dof : {3, 5}) cases.push_back({q, d, dof});
  }
  const std::size_t n = c.budget(1e5);
  std::vector<double> z(cases.size());
  c.runner.run(cases.size(), c.seed, [&](std::size_t i, Rng& rng) {
    const Case& k = cases[i];
    const HypergroupParams p(k.q, k.d, 0.5 * k.dof * k.d, IndexRange::wishart);
    RunningMean stats[2][3];
    auto add = [&](int side, const ConePoint& r) {
      stats[side][0].add(r.trace());
      stats[side][1].add(r.squared().trace());
      stats[side][2].add(r.determinant());
    };
    for (std::size_t j = 0; j < n; ++j) {
      add(0, sample_standard(p, rng));
      // r^2 = X X^* with X a q x dof Gaussian matrix
      MatrixStorage x(k.q, k.dof);
      for (int a = 0; a < k.q; ++a)
        for (int b = 0; b < k.dof; ++b) x(a, b) = {rng.normal(), k.d == 2 ? rng.normal() : 0.0};
      add(1, psd_sqrt(hermitian_from_storage(k.d, x * x.adjoint())));
    }
    for (int s = 0; s < 3; ++s) {
      z[i] = std::max(z[i], std::abs(two_sample_z(stats[0][s].estimate(), stats[1][s].estimate())));
    }
  });
  const double worst = *std::max_element(z.begin(), z.end());
  return {worst <= 3.0, fmt("max two-sample z %.2f over %g cases", worst, static_cast<double>(cases.size())),
          {{"z", z}, {"samples", n}}};
}

// 12 -------------------------------------------------------------------------
Outcome kappa_pinning(const Ctx& c) {
  std::vector<HypergroupParams> ps;
  if (c.restricted()) {
    if (c.only().q() != 1) return skip("needs q = 1");
    ps.push_back(c.only());
  } else {
    ps = {HypergroupParams(1, 1, 2.0), HypergroupParams(1, 2, 2.0)};
  }
  Rng rng(c.seed);
  const std::size_t n = c.budget(1e5);
  boost::math::quadrature::tanh_sinh<double> ts;
  bool ok = true;
  double worst_z = 0.0;
  double worst_quad = 0.0;
  double worst_pin = 0.0;
  for (const auto& p : ps) {
    const double closed = kappa_closed(p);
    const double e = p.mu() - p.rho();
    const double quad = p.d() == 1 ? ts.integrate([&](double v) { return std::pow(1 - v * v, e); }, -1.0, 1.0)
                                   : 2 * std::numbers::pi *
                                         ts.integrate([&](double t) { return t * std::pow(1 - t * t, e); }, 0.0, 1.0);
    if (p.mu() == 2.0) {
      const double pinned = p.d() == 1 ? std::numbers::pi / 2 : std::numbers::pi;
      worst_pin = std::max(worst_pin, std::abs(closed - pinned));
      ok &= std::abs(closed - pinned) <= 1e-12;
    }
    const double z = one_sample_z(kappa(p, n, rng), closed);
    worst_z = std::max(worst_z, z);
    worst_quad = std::max(worst_quad, std::abs(quad - closed));
    ok &= z <= 3.0 && std::abs(quad - closed) <= 1e-6;
  }
  return {ok, fmt("Monte Carlo max z %.2f, |quadrature - closed| %.1e, |closed - pinned| %.1e", worst_z, worst_quad, worst_pin),
          {{"max_z", worst_z}, {"quadrature_error", worst_quad}, {"pinned_error", worst_pin}}};
}

// 13 -------------------------------------------------------------------------
Outcome translated_wishart(const Ctx& c) {
  std::vector<HypergroupParams> ps;
  if (c.restricted()) {
    if (c.only().q() != 1) return skip("needs q = 1");
    ps.push_back(c.only());
  } else {
    ps = {HypergroupParams(1, 1, 2.0), HypergroupParams(1, 2, 2.0)};
  }
  const std::size_t n = c.budget(1e5);
  const double xs[3] = {0.5, 1.0, 2.0};
  const std::size_t jobs = ps.size() * 3;
  std::vector<double> ks(jobs), mass_err(jobs);
  c.runner.run(jobs, c.seed, [&](std::size_t i, Rng& rng) {
    const HypergroupParams& p = ps[i / 3];
    const double x = xs[i % 3];
    const ConePoint px = ConePoint::diagonal(p.d(), {x});
    const ConePoint one = ConePoint::identity(1, p.d());
    // omega_mu on q = 1: haar_constant * 2 y^{2 mu - 1} dy; mass beyond x + 12 is below e^{-70}
    auto f = [&](double y) {
      return haar_constant(p) * 2.0 * std::pow(y, 2 * p.mu() - 1) *
             translated_density(p, px, one, ConePoint::diagonal(p.d(), {y}));
    };
    const int cells = 3000;
    const double top = x + 12.0;
    std::vector<double> node(cells + 1), cdf(cells + 1, 0.0);
    for (int k = 0; k <= cells; ++k) node[k] = top * k / cells;
    for (int k = 0; k < cells; ++k) {
      cdf[k + 1] = cdf[k] + boost::math::quadrature::gauss<double, 10>::integrate(f, node[k], node[k + 1]);
    }
    std::vector<double> z;
    z.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      z.push_back(conv_sample(p, px, sample_scaled({p, one, 1.0}, rng), rng)(0, 0).real());
    }
    // cell width 0.005: linear interpolation of the CDF is accurate to ~1e-6
    ks[i] = ks_one_sample(z, [&](double t) {
      if (t >= top) return cdf.back();
      const double pos = t / top * cells;
      const int k = std::min(cells - 1, static_cast<int>(pos));
      return cdf[k] + (pos - k) * (cdf[k + 1] - cdf[k]);
    });
    mass_err[i] = std::abs(cdf.back() - 1.0);
  });
  const double worst_ks = *std::max_element(ks.begin(), ks.end());
  const double worst_mass = *std::max_element(mass_err.begin(), mass_err.end());
  return {worst_ks <= 0.01 && worst_mass <= 1e-6, fmt("max KS distance %.4f, max |mass - 1| %.1e", worst_ks, worst_mass),
          {{"ks", ks}, {"mass_error", mass_err}, {"samples", n}}};
}

// 14 -------------------------------------------------------------------------
Outcome second_moment(const Ctx& c) {
  const auto ps = configs(c, {above_rho(2, 1, 0.5), above_rho(2, 2, 0.5), above_rho(3, 1, 0.5), above_rho(3, 2, 0.5)});
  const std::size_t n = c.budget(2e4);
  std::vector<double> z(20);
  c.runner.run(20, c.seed, [&](std::size_t i, Rng& rng) {
    const HypergroupParams& p = ps[i % ps.size()];
    const int q = p.q();
    const ConePoint x = random_cone_point(q, p.d(), rng, 1.0);
    const ConePoint y = random_cone_point(q, p.d(), rng, 1.0);
    const MatrixStorage expected = x.squared().data() + y.squared().data();
    std::vector<RunningMean> re(static_cast<std::size_t>(q * q)), im(static_cast<std::size_t>(q * q));
    for (std::size_t k = 0; k < n; ++k) {
      const ConePoint sq = conv_sample(p, x, y, rng).squared();
      for (int a = 0; a < q; ++a) {
        for (int b = a; b < q; ++b) {
          re[a * q + b].add(sq(a, b).real());
          im[a * q + b].add(sq(a, b).imag());
        }
      }
    }
    for (int a = 0; a < q; ++a) {
      for (int b = a; b < q; ++b) {
        z[i] = std::max(z[i], one_sample_z(re[a * q + b].estimate(), expected(a, b).real()));
        if (p.d() == 2 && a != b) z[i] = std::max(z[i], one_sample_z(im[a * q + b].estimate(), expected(a, b).imag()));
      }
    }
  });
  const double worst = *std::max_element(z.begin(), z.end());
  return {worst <= 3.0, fmt("max entrywise z %.2f over 20 pairs", worst), {{"z", z}, {"samples", n}}};
}

// 15 -------------------------------------------------------------------------
Outcome clt(const Ctx& c) {
  const auto ps = configs(c, {above_rho(1, 1, 0.5), above_rho(1, 2, 0.5), above_rho(2, 1, 0.5), above_rho(2, 2, 0.5)});
  const int replicas = static_cast<int>(c.budget(2e4));
  bool ok = true;
  Json rows = Json::array();
  std::string detail;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const HypergroupParams& p = ps[i];
    // sigma^2 = diag(1, 0.49, ...)
    std::vector<double> diag;
    for (int k = 0; k < p.q(); ++k) diag.push_back(std::sqrt(2.0 * p.mu()) * std::pow(0.7, k));
    const StepLaw law = PointMassStep{ConePoint::diagonal(p.d(), diag)};
    const auto grid = default_s_grid(p.q(), p.d(), 8, 1.2);
    const std::uint64_t seed = derive_seed(c.seed, i);
    const CltReport early = clt_experiment(p, law, 4, replicas, grid, seed, c.runner);
    const CltReport late = clt_experiment(p, law, 64, replicas, grid, seed, c.runner);
    const bool pass = late.sup_deviation <= 0.02 && late.sup_deviation < early.sup_deviation;
    ok &= pass;
    detail += "q" + std::to_string(p.q()) + "d" + std::to_string(p.d()) +
              fmt(": n=64 %.4f vs n=4 %.4f; ", late.sup_deviation, early.sup_deviation);
    rows.push_back({{"params", to_json(p)}, {"n4", to_json(early)}, {"n64", to_json(late)}});
  }
  if (!detail.empty()) detail.resize(detail.size() - 2);
  return {ok, "sup deviation " + detail, {{"runs", rows}, {"replicas", replicas}}};
}

// 16 -------------------------------------------------------------------------
Outcome slln(const Ctx& c) {
  const HypergroupParams p = c.restricted() ? c.only() : above_rho(2, 1, 0.5);
  const int replicas = static_cast<int>(std::max<std::size_t>(20, c.budget(200)));
  const StepLaw law = WishartStep{{p, ConePoint::identity(p.q(), p.d()), 1.0}};
  const SllnReport r = slln_experiment(p, law, Normalisation::linear, 1.0, 4096, replicas, c.seed, c.runner);
  return {r.fraction_last_below_first >= 0.95 && r.median_decreasing,
          fmt("last < first in %.1f%% of replicas; median ", 100.0 * r.fraction_last_below_first) +
              (r.median_decreasing ? "decreasing" : "not decreasing"),
          to_json(r)};
}

// 17 -------------------------------------------------------------------------
Outcome martingale(const Ctx& c) {
  const HypergroupParams p = c.restricted() ? c.only() : above_rho(2, 2, 0.5);
  const int replicas = static_cast<int>(c.budget(1e4));
  const StepLaw law = WishartStep{{p, ConePoint::identity(p.q(), p.d()), 1.0}};
  std::vector<double> diag;
  for (int k = 0; k < p.q(); ++k) diag.push_back(0.12 + 0.03 * k);
  const ConePoint s = ConePoint::diagonal(p.d(), diag);
  const MartingaleReport r = martingale_check(p, law, s, 64, replicas, c.seed, c.runner);
  return {r.max_z <= 3.0,
          fmt("max z %.2f over n = 1..64 (hat mu(s)^64 = %.3f); second-moment max z %.2f", r.max_z,
              std::pow(r.step_transform, 64), r.max_second_moment_z),
          to_json(r)};
}

using Runner = Outcome (*)(const Ctx&);

struct Entry {
  CriterionInfo info;
  Runner run;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries{
      {{1, "trace identity"}, trace_identity},
      {{2, "rank-one reduction"}, rank_one},
      {{3, "Bochner vs series"}, bochner},
      {{4, "product formula"}, product_formula},
      {{5, "support lemma"}, support_lemma},
      {{6, "norm support bound"}, norm_bound},
      {{7, "automorphism covariance"}, automorphism},
      {{8, "character restriction"}, restriction},
      {{9, "Wishart Fourier transform"}, wishart_fourier},
      {{10, "Wishart semigroup"}, wishart_semigroup},
      {{11, "Bartlett vs Gaussian matrix"}, bartlett_vs_gaussian},
      {{12, "kappa pinning"}, kappa_pinning},
      {{13, "translated Wishart"}, translated_wishart},
      {{14, "second-moment additivity"}, second_moment},
      {{15, "CLT"}, clt},
      {{16, "SLLN"}, slln},
      {{17, "martingale identity"}, martingale},
  };
  return entries;
}

}  // namespace

const std::vector<CriterionInfo>& criteria() {
  static const std::vector<CriterionInfo> infos = [] {
    std::vector<CriterionInfo> out;
    for (const auto& e : registry()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

CriterionResult run_criterion(int id, const CheckOptions& opts) {
  const auto& reg = registry();
  const auto it = std::find_if(reg.begin(), reg.end(), [&](const Entry& e) { return e.info.id == id; });
  if (it == reg.end()) throw DomainError("unknown criterion " + std::to_string(id));
  if (opts.only) opts.only->require_hypergroup();
  const Ctx ctx{opts, derive_seed(opts.seed, static_cast<std::uint64_t>(id)), ReplicaRunner(opts.workers)};
  CriterionResult r;
  r.id = id;
  r.name = it->info.name;
  const auto start = std::chrono::steady_clock::now();
  try {
    Outcome o = it->run(ctx);
    r.passed = o.passed;
    r.skipped = o.skipped;
    r.detail = std::move(o.detail);
    r.data = std::move(o.data);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> run_checks(const CheckOptions& opts, std::vector<int> ids) {
  if (ids.empty()) {
    for (const auto& c : criteria()) ids.push_back(c.id);
  }
  std::stable_partition(ids.begin(), ids.end(), [](int id) { return id != 6; });
  reset_support_audit();
  std::vector<CriterionResult> out;
  for (int id : ids) out.push_back(run_criterion(id, opts));
  return out;
}

std::string summary_line(const CriterionResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-4s %2d  ", r.skipped ? "SKIP" : (r.passed ? "PASS" : "FAIL"), r.id);
  char tail[32];
  std::snprintf(tail, sizeof tail, "  (%.1f s)", r.seconds);
  return buf + r.name + ": " + r.detail + tail;
}

nlohmann::json to_json(const CriterionResult& r) {
  return {{"id", r.id},         {"name", r.name},       {"passed", r.passed}, {"skipped", r.skipped},
          {"detail", r.detail}, {"seconds", r.seconds}, {"data", r.data}};
}

}  // namespace conebessel
