#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "conebessel/ball_measure.hpp"
#include "conebessel/jack_series.hpp"
#include "conebessel/random_matrix.hpp"
#include "doctest.h"

using namespace conebessel;

namespace {

bool within3(const Estimate& e, double target) {
  return std::abs(e.value - target) <= 3.0 * e.std_error + 1e-12;
}

// Independent angle sampler for q = 1: cos(theta) = 2B - 1, B ~ Beta(mu - 1/2, mu - 1/2).
double cos_theta(double mu, Rng& rng) {
  const double a = rng.gamma(mu - 0.5, 1.0);
  const double b = rng.gamma(mu - 0.5, 1.0);
  return 2.0 * a / (a + b) - 1.0;
}

// KS critical value at level 1e-3 for two samples of size n.
double ks_critical(std::size_t n) { return 1.95 * std::sqrt(2.0 / static_cast<double>(n)); }

}  // namespace

TEST_CASE("ball sampler: rank one moments and support") {
  Rng rng(101);
  for (double mu : {0.8, 2.0, 5.5}) {
    const HypergroupParams p(1, 1, mu);
    RunningMean v2, v1;
    for (int k = 0; k < 100000; ++k) {
      const auto v = sample_ball(p, rng);
      const double x = v.matrix()(0, 0).real();
      REQUIRE(std::abs(x) < 1.0);
      v2.add(x * x);
      v1.add(x);
    }
    const double beta_moment = boost::math::beta(1.5, mu - 0.5) / boost::math::beta(0.5, mu - 0.5);
    CHECK(beta_moment == doctest::Approx(1.0 / (2 * mu)));
    CHECK(within3(v2.estimate(), beta_moment));
    CHECK(within3(v1.estimate(), 0.0));
  }
}

TEST_CASE("ball sampler: complex rank one radial law") {
  Rng rng(102);
  const HypergroupParams p(1, 2, 2.7);
  std::vector<double> u;
  for (int k = 0; k < 50000; ++k) u.push_back(std::norm(sample_ball(p, rng).matrix()(0, 0)));
  // |v|^2 ~ Beta(1, mu - 1)
  const double ks = ks_one_sample(u, [&](double x) { return 1.0 - std::pow(1.0 - x, p.mu() - 1.0); });
  CHECK(ks < 1.95 / std::sqrt(50000.0));
}

TEST_CASE("ball sampler agrees with box rejection") {
  Rng rng(103);
  for (int d = 1; d <= 2; ++d) {
    const HypergroupParams p(2, d, 2 * d + 3.0);
    std::vector<double> exact, rejected;
    for (int k = 0; k < 4000; ++k) {
      const auto a = sample_ball(p, rng).matrix();
      const auto b = sample_ball_rejection(p, rng).matrix();
      REQUIRE(a.spectral_norm() < 1.0);
      exact.push_back((a.data().adjoint() * a.data()).trace().real() + a(0, 1).real());
      rejected.push_back((b.data().adjoint() * b.data()).trace().real() + b(0, 1).real());
    }
    CHECK(ks_two_sample(exact, rejected) < ks_critical(4000));
  }
  CHECK_THROWS_AS(sample_ball_rejection(HypergroupParams(2, 1, 2.0), rng), DomainError);
}

TEST_CASE("kappa closed form and Monte Carlo") {
  Rng rng(104);
  const HypergroupParams real(1, 1, 2.0);
  const HypergroupParams complex(1, 2, 2.0);
  CHECK(kappa_closed(real) == doctest::Approx(std::numbers::pi / 2));
  CHECK(kappa_closed(complex) == doctest::Approx(std::numbers::pi));
  CHECK(within3(kappa(real, 200000, rng), std::numbers::pi / 2));
  CHECK(within3(kappa(complex, 200000, rng), std::numbers::pi));
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double mu : {1.2, 2.0, 3.3}) {
    const HypergroupParams p(1, 1, mu);
    const double quad = ts.integrate([&](double v) { return std::pow(1 - v * v, mu - 1.5); }, -1.0, 1.0);
    CHECK(std::abs(quad - kappa_closed(p)) < 1e-6);
    CHECK(within3(kappa(p, 200000, rng), quad));
    const HypergroupParams c(1, 2, mu + 0.5);
    // polar coordinates: 2 pi int_0^1 (1 - t^2)^{mu - 2} t dt
    const double polar = 2 * std::numbers::pi *
                         ts.integrate([&](double t) { return std::pow(1 - t * t, c.mu() - 2) * t; }, 0.0, 1.0);
    CHECK(std::abs(polar - kappa_closed(c)) < 1e-6);
  }
  for (int d = 1; d <= 2; ++d) {
    const HypergroupParams p(2, d, 2 * d + 2.0);
    CHECK(within3(kappa(p, 400000, rng), kappa_closed(p)));
  }
}

TEST_CASE("bochner evaluator") {
  Rng rng(105);
  const HypergroupParams p(2, 2, 4.5);
  const ConePoint r = random_cone_point(2, 2, rng);
  const auto zero = phi_bochner(p, ConePoint::zero(2, 2), r, 1000, rng);
  CHECK(zero.real.value == 1.0);
  CHECK(zero.real.std_error == 0.0);
  for (int q = 1; q <= 3; ++q) {
    for (int d = 1; d <= 2; ++d) {
      const HypergroupParams h(q, d, d * (q - 0.5) + 1.0);
      const ConePoint s = random_cone_point(q, d, rng, 0.8);
      const ConePoint x = random_cone_point(q, d, rng, 0.8);
      const auto b = phi_bochner(h, s, x, 40000, rng);
      CHECK(within3(b.real, character_phi(h, s, x)));
      CHECK(b.imaginary_consistent());
      CHECK(std::abs(b.real.value) <= 1.0 + 3 * b.real.std_error);
    }
  }
}

TEST_CASE("convolution: neutral element, rank one law") {
  Rng rng(106);
  const HypergroupParams p(2, 1, 3.0);
  const ConePoint s = random_cone_point(2, 1, rng);
  for (int k = 0; k < 100; ++k) {
    const ConePoint z = conv_sample(p, ConePoint::zero(2, 1), s, rng);
    CHECK((z.hermitian() - s.hermitian()).norm() < 1e-12);
  }
  for (double mu : {0.7, 2.5}) {
    const HypergroupParams one(1, 1, mu);
    const double r = 1.3, t = 0.6;
    std::vector<double> conv, angle;
    for (int k = 0; k < 20000; ++k) {
      conv.push_back(conv_sample(one, ConePoint::diagonal(1, {r}), ConePoint::diagonal(1, {t}), rng)(0, 0).real());
      angle.push_back(std::sqrt(r * r + t * t - 2 * r * t * cos_theta(mu, rng)));
    }
    CHECK(ks_two_sample(conv, angle) < ks_critical(20000));
  }
}

TEST_CASE("convolution: support window and norm bound") {
  Rng rng(107);
  reset_support_audit();
  for (int d = 1; d <= 2; ++d) {
    const HypergroupParams p(3, d, 3 * d + 0.5);
    const ConePoint full = random_cone_point(3, d, rng);
    const SquareMatrix u = random_unitary(3, d, rng);
    const ConePoint deficient(HermitianMatrix::congruence(u, HermitianMatrix::diagonal(d, {0.0, 0.7, 1.4})));
    for (const ConePoint& r : {full, deficient}) {
      for (double c : {0.3, 1.0}) {
        const ConePoint s((c)*r.hermitian());
        for (int k = 0; k < 2000; ++k) {
          const ConePoint z = conv_sample(p, r, s, rng);
          REQUIRE(support_window_check(p, r, c, z, 1e-8));
        }
      }
    }
    const ConePoint r = random_cone_point(3, d, rng);
    const double c = 0.4;
    CHECK(support_window_check(p, r, c, ConePoint((1 - c) * r.hermitian()), 1e-12));
    CHECK(support_window_check(p, r, c, ConePoint((1 + c) * r.hermitian()), 1e-12));
    CHECK_FALSE(support_window_check(p, r, c, ConePoint((1 + 2 * c) * r.hermitian()), 1e-12));
  }
  const auto audit = support_audit();
  CHECK(audit.samples == 2 * 4 * 2000);
  CHECK(audit.violations == 0);
}

TEST_CASE("convolution expectations") {
  Rng rng(108);
  for (int d = 1; d <= 2; ++d) {
    const HypergroupParams p(2, d, 2 * d + 1.0);
    const ConePoint r = random_cone_point(2, d, rng);
    const ConePoint s = random_cone_point(2, d, rng);
    const auto one = conv_expect(p, [](const ConePoint&) { return 1.0; }, r, s, 100, rng);
    CHECK(one.value == 1.0);
    const ConePoint t = random_cone_point(2, d, rng);
    const auto prod = conv_expect(p, [&](const ConePoint& z) { return character_phi(p, t, z); }, r, s, 20000, rng);
    CHECK(within3(prod, character_phi(p, t, r) * character_phi(p, t, s)));
    const double target = r.squared().trace() + s.squared().trace();
    const auto second = conv_expect(p, [](const ConePoint& z) { return z.squared().trace(); }, r, s, 20000, rng);
    CHECK(within3(second, target));
  }
}

TEST_CASE("convolution is commutative in law") {
  Rng rng(109);
  const HypergroupParams p(2, 2, 4.0);
  const ConePoint r = random_cone_point(2, 2, rng);
  const ConePoint s = random_cone_point(2, 2, rng, 2.0);
  std::vector<double> a_tr, b_tr, a_det, b_det;
  for (int k = 0; k < 10000; ++k) {
    const ConePoint a = conv_sample(p, r, s, rng);
    const ConePoint b = conv_sample(p, s, r, rng);
    a_tr.push_back(a.trace());
    b_tr.push_back(b.trace());
    a_det.push_back(a.determinant());
    b_det.push_back(b.determinant());
  }
  CHECK(ks_two_sample(a_tr, b_tr) < ks_critical(10000));
  CHECK(ks_two_sample(a_det, b_det) < ks_critical(10000));
}

TEST_CASE("empirical measure csv round trip") {
  Rng rng(110);
  const HypergroupParams p(2, 2, 4.0);
  std::vector<ConePoint> pts;
  for (int k = 0; k < 5; ++k) pts.push_back(random_cone_point(2, 2, rng));
  const EmpiricalMeasure m = EmpiricalMeasure::uniform(p, pts, 42);
  std::stringstream io;
  write_csv(io, m);
  const EmpiricalMeasure back = read_csv(io);
  CHECK(back.q == 2);
  CHECK(back.d == 2);
  CHECK(back.mu == 4.0);
  CHECK(back.seed == 42);
  REQUIRE(back.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK((back.points[k].hermitian() - pts[k].hermitian()).norm() < 1e-14);
    CHECK(back.weights[k] == doctest::Approx(0.2));
  }
  std::stringstream bad("# conebessel 0.1.0 q=1 d=1 mu=2\nm00,weight\n1.0\n");
  CHECK_THROWS_AS(read_csv(bad), Error);
}
