#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "conebessel/random_matrix.hpp"
#include "conebessel/wishart.hpp"
#include "doctest.h"

using namespace conebessel;
using boost::math::quadrature::exp_sinh;
using boost::math::quadrature::tanh_sinh;

namespace {

bool within3(const Estimate& e, double target) {
  return std::abs(e.value - target) <= 3.0 * e.std_error + 1e-12;
}

double ks_critical(std::size_t n) { return 1.95 * std::sqrt(2.0 / static_cast<double>(n)); }

std::vector<double> grid_targets(const HypergroupParams& p, const ConePoint& cov, const std::vector<ConePoint>& grid) {
  std::vector<double> out;
  for (const auto& s : grid) out.push_back(fourier_closed(p, cov, s));
  return out;
}

// omega_mu mass of a q = 2 density depending on r only through its diagonal
// (a, b) when r = [[a, c], [c*, b]], |c| = sqrt(ab) t.
double q2_mass(const HypergroupParams& p, const std::function<double(double, double)>& f) {
  const double g = p.gamma();
  exp_sinh<double> half_line;
  tanh_sinh<double> interval;
  double angular = 0.0;
  double power = 0.0;
  if (p.d() == 1) {
    angular = std::sqrt(2.0) * interval.integrate([&](double t) { return std::pow(1 - t * t, g); }, -1.0, 1.0);
    power = g + 0.5;
  } else {
    angular = 2.0 * 2.0 * std::numbers::pi *
              interval.integrate([&](double t) { return t * std::pow(1 - t * t, g); }, 0.0, 1.0);
    power = g + 1.0;
  }
  const double planar = half_line.integrate([&](double a) {
    return half_line.integrate([&](double b) {
      const double v = f(a, b);
      return v == 0.0 ? 0.0 : v * std::pow(a * b, power);
    });
  });
  return haar_constant(p) * angular * planar;
}

}  // namespace

TEST_CASE("standard sampler: chi law and second moment") {
  Rng rng(301);
  for (int dof : {3, 5}) {
    const HypergroupParams p(1, 1, dof / 2.0, IndexRange::wishart);
    std::vector<double> bartlett, gaussian;
    for (int k = 0; k < 20000; ++k) {
      bartlett.push_back(sample_standard(p, rng)(0, 0).real());
      double sq = 0.0;
      for (int i = 0; i < dof; ++i) sq += std::pow(rng.normal(), 2);
      gaussian.push_back(std::sqrt(sq));
    }
    CHECK(ks_two_sample(bartlett, gaussian) < ks_critical(20000));
  }
  for (int d = 1; d <= 2; ++d) {
    const HypergroupParams p(3, d, 3 * d + 0.7);
    std::vector<RunningMean> entries(18);
    for (int k = 0; k < 20000; ++k) {
      const ConePoint r2 = sample_standard(p, rng).squared();
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          entries[3 * i + j].add(r2(i, j).real());
          entries[9 + 3 * i + j].add(r2(i, j).imag());
        }
      }
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        CHECK(within3(entries[3 * i + j].estimate(), i == j ? 2 * p.mu() : 0.0));
        CHECK(within3(entries[9 + 3 * i + j].estimate(), 0.0));
      }
    }
  }
}

TEST_CASE("standard sampler: Fourier transform and unitary invariance") {
  Rng rng(302);
  for (int d = 1; d <= 2; ++d) {
    const HypergroupParams p(2, d, 2 * d + 0.3);
    std::vector<ConePoint> pts, rotated;
    const SquareMatrix u = random_unitary(2, d, rng);
    for (int k = 0; k < 20000; ++k) {
      pts.push_back(sample_standard(p, rng));
      rotated.emplace_back(HermitianMatrix::congruence(u, sample_standard(p, rng)));
    }
    const auto grid = default_s_grid(2, d, 6, 1.2);
    const auto panel = fourier_panel(p, EmpiricalMeasure::uniform(p, pts, 0), grid,
                                     grid_targets(p, ConePoint::identity(2, d), grid));
    CHECK(panel.consistent());
    CHECK(compare_laws(p, pts, rotated, grid).consistent());
  }
}

TEST_CASE("scaled sampler") {
  Rng rng(303);
  const HypergroupParams p(3, 1, 4.0);
  for (int k = 0; k < 10; ++k) CHECK(sample_scaled({p, ConePoint::zero(3, 1), 1.0}, rng).norm() == 0.0);
  const ConePoint cov = random_cone_point(3, 1, rng);
  std::vector<ConePoint> pts;
  for (int k = 0; k < 20000; ++k) pts.push_back(sample_scaled({p, cov, 0.5}, rng));
  const auto grid = default_s_grid(3, 1, 6, 1.0);
  const ConePoint half(0.5 * cov.hermitian());
  CHECK(fourier_panel(p, EmpiricalMeasure::uniform(p, pts, 0), grid, grid_targets(p, half, grid)).consistent());
  // rank-2 covariance: the standard law on the embedded X_{2,mu}
  const Subhypergroup h(2, random_unitary(3, 1, rng));
  const ConePoint singular = embed_sub(h, ConePoint::identity(2, 1));
  const HypergroupParams small(2, 1, p.mu());
  std::vector<ConePoint> blocks, direct;
  for (int k = 0; k < 20000; ++k) {
    const ConePoint z = sample_scaled({p, singular, 1.0}, rng);
    REQUIRE(distance_from_sub(h, z) < 1e-9);
    blocks.push_back(restrict_to_sub(h, z));
    direct.push_back(sample_standard(small, rng));
  }
  CHECK(compare_laws(small, blocks, direct, default_s_grid(2, 1, 4, 1.0)).consistent());
}

TEST_CASE("density normalisation pins the cone gamma function") {
  exp_sinh<double> half_line;
  for (double mu : {0.8, 2.0, 3.5}) {
    for (double scale : {1.0, 1.7}) {
      const HypergroupParams p(1, 1, mu, IndexRange::wishart);
      const WishartSpec spec{p, ConePoint::diagonal(1, {scale * scale}), 1.0};
      const double mass = haar_constant(p) * 2.0 * half_line.integrate([&](double y) {
        const double v = density(spec, ConePoint::diagonal(1, {y}));
        return v == 0.0 ? 0.0 : v * std::pow(y, 2 * mu - 1);
      });
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
  for (int d = 1; d <= 2; ++d) {
    const HypergroupParams p(2, d, d == 1 ? 2.0 : 3.0, IndexRange::wishart);
    for (double s1 : {1.0, 1.6}) {
      const double s2 = 1.0 / std::sqrt(s1) + 0.2;
      const WishartSpec spec{p, ConePoint::diagonal(d, {s1, s2}), 1.0};
      const double mass = q2_mass(p, [&](double a, double b) {
        return density(spec, ConePoint::diagonal(d, {std::sqrt(a), std::sqrt(b)}));
      });
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-4));
    }
  }
  CHECK_THROWS_AS(density({HypergroupParams(2, 1, 3.0), ConePoint::diagonal(1, {1.0, 0.0}), 1.0},
                          ConePoint::identity(2, 1)),
                  DomainError);
}

TEST_CASE("fourier_closed") {
  Rng rng(304);
  const HypergroupParams p(2, 2, 4.0);
  const ConePoint s = random_cone_point(2, 2, rng);
  CHECK(fourier_closed(p, random_cone_point(2, 2, rng), ConePoint::zero(2, 2)) == 1.0);
  CHECK(fourier_closed(p, ConePoint::zero(2, 2), s) == 1.0);
  CHECK(fourier_closed(p, ConePoint::identity(2, 2), s) == doctest::Approx(std::exp(-0.5 * s.squared().trace())));
}

TEST_CASE("translated density") {
  const HypergroupParams p(1, 1, 1.7);
  const ConePoint one = ConePoint::identity(1, 1);
  const WishartSpec spec{p, one, 1.0};
  for (double y : {0.2, 1.0, 3.0}) {
    const ConePoint py = ConePoint::diagonal(1, {y});
    CHECK(translated_density(p, ConePoint::zero(1, 1), one, py) == doctest::Approx(density(spec, py)).epsilon(1e-13));
  }
  tanh_sinh<double> interval;
  for (double x : {0.5, 1.0, 2.0}) {
    // mass beyond x + 12 is below e^{-70}
    const double mass = haar_constant(p) * 2.0 * interval.integrate([&](double y) {
      return translated_density(p, ConePoint::diagonal(1, {x}), one, ConePoint::diagonal(1, {y})) *
             std::pow(y, 2 * p.mu() - 1);
    }, 0.0, x + 12.0);
    CHECK(std::abs(mass - 1.0) < 1e-6);
  }
  // q = 2 check at a non-identity scale against the Lebesgue form for x = 0
  const HypergroupParams two(2, 2, 3.5);
  const ConePoint s = ConePoint::diagonal(2, {1.2, 0.8});
  const ConePoint y = ConePoint::diagonal(2, {0.7, 1.1});
  CHECK(translated_density(two, ConePoint::zero(2, 2), s, y) ==
        doctest::Approx(density({two, s.squared(), 1.0}, y)).epsilon(1e-12));
}

TEST_CASE("wishart semigroup and pushforward") {
  Rng rng(305);
  const HypergroupParams p(2, 1, 3.0);
  const auto grid = default_s_grid(2, 1, 6, 1.0);
  const auto zero = semigroup_check(p, ConePoint::identity(2, 1), ConePoint::zero(2, 1), 10000, rng, grid);
  CHECK(zero.panel.consistent());
  const auto doubled = semigroup_check(p, ConePoint::identity(2, 1), ConePoint::identity(2, 1), 10000, rng, grid);
  CHECK(doubled.panel.consistent());
  const ConePoint c = random_cone_point(2, 1, rng, 0.8);
  const ConePoint b2 = random_cone_point(2, 1, rng, 0.8);
  std::vector<ConePoint> pushed;
  for (int k = 0; k < 20000; ++k) pushed.push_back(automorphism_apply(Automorphism(c.hermitian().matrix()), sample_scaled({p, b2, 1.0}, rng)));
  const ConePoint cbc(HermitianMatrix::congruence(c.hermitian().matrix(), b2));
  CHECK(fourier_panel(p, EmpiricalMeasure::uniform(p, pushed, 0), grid, grid_targets(p, cbc, grid)).consistent());
}

TEST_CASE("wishart semigroup is Gaussian: small-time concentration") {
  Rng rng(306);
  const HypergroupParams p(1, 1, 2.0);
  double previous = HUGE_VAL;
  for (double t : {0.1, 0.05, 0.025}) {
    int outside = 0;
    const int n = 200000;
    for (int k = 0; k < n; ++k) outside += sample_scaled({p, ConePoint::identity(1, 1), t}, rng).norm() > 1.0;
    const double ratio = outside / static_cast<double>(n) / t;
    CHECK(ratio < previous);
    previous = ratio;
  }
}
