#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/LU>

#include "conebessel/jack_series.hpp"
#include "conebessel/random_matrix.hpp"
#include "doctest.h"

using namespace conebessel;

namespace {

double rising(double a, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= a + i;
  return r;
}

double factorial(int k) { return std::tgamma(k + 1.0); }

// c'_lambda = prod (alpha a(s) + l(s) + alpha)
double hook_c_prime(const Partition& lam, double alpha) {
  double c = 1.0;
  for (int i = 0; i < lam.length(); ++i) {
    for (int j = 0; j < lam[i]; ++j) {
      const int arm = lam[i] - j - 1;
      const int leg = lam.conjugate(j) - i - 1;
      c *= alpha * arm + leg + alpha;
    }
  }
  return c;
}

// Two variables: P_lambda = (x1 x2)^{l2} P_(l1-l2), with the one-row P read
// off the generating function prod (1 - x_i t)^{-1/alpha}.
double two_variable_C(const Partition& lam, double alpha, double x1, double x2) {
  const int m = lam[0] - lam[1];
  const double beta = 1.0 / alpha;
  double g = 0.0;
  for (int a = 0; a <= m; ++a) {
    g += rising(beta, a) / factorial(a) * rising(beta, m - a) / factorial(m - a) *
         std::pow(x1, a) * std::pow(x2, m - a);
  }
  const double p_row = g * factorial(m) / rising(beta, m);
  const double p = std::pow(x1 * x2, lam[1]) * p_row;
  const int k = lam.weight();
  return std::pow(alpha, k) * factorial(k) / hook_c_prime(lam, alpha) * p;
}

// alpha = 1: C_lambda = k!/H_lambda s_lambda with s_lambda the bialternant.
double schur_C(const Partition& lam, const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd num(n, n), den(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      num(i, j) = std::pow(x[i], lam[j] + n - 1 - j);
      den(i, j) = std::pow(x[i], n - 1 - j);
    }
  }
  const int k = lam.weight();
  return factorial(k) / hook_c_prime(lam, 1.0) * num.determinant() / den.determinant();
}

std::vector<double> spectrum(const HermitianMatrix& h) {
  const auto e = eig_herm(h);
  return {e.values.data(), e.values.data() + e.values.size()};
}

double scalar_series(double mu, double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -x / ((mu + k - 1) * k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum) && k > 5) break;
  }
  return sum;
}

}  // namespace

TEST_CASE("partitions enumeration") {
  const auto two = partitions(2, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == Partition{2});
  CHECK(two[1] == Partition{1, 1});
  const auto one_row = partitions(3, 1);
  REQUIRE(one_row.size() == 1);
  CHECK(one_row[0] == Partition{3});
  // brute force over nonincreasing triples
  int count = 0;
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; b <= a; ++b)
      for (int c = 0; c <= b; ++c) count += a + b + c == 6;
  CHECK(partitions(6, 3).size() == static_cast<std::size_t>(count));
  CHECK(count == 7);
  const auto six = partitions(6, 3);
  for (std::size_t i = 1; i < six.size(); ++i) CHECK(six[i - 1] > six[i]);
  CHECK(partitions(0, 2).size() == 1);
}

TEST_CASE("jack_C low degree") {
  const std::vector<double> xi{0.3, -1.2, 2.5};
  CHECK(jack_C(Partition{1}, 2.0, xi) == doctest::Approx(1.6));
  CHECK(jack_C(Partition{}, 2.0, xi) == doctest::Approx(1.0));
  // degree two in monomials: C_(2) = m2 + 2/(1+a) m11, C_(11) = 2a/(1+a) m11
  for (double alpha : {0.5, 1.0, 2.0, 3.7}) {
    const double m2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    const double m11 = xi[0] * xi[1] + xi[0] * xi[2] + xi[1] * xi[2];
    CHECK(jack_C(Partition{2}, alpha, xi) == doctest::Approx(m2 + 2.0 / (1 + alpha) * m11));
    CHECK(jack_C(Partition{1, 1}, alpha, xi) == doctest::Approx(2 * alpha / (1 + alpha) * m11));
  }
  const std::vector<double> ones{1.0, 1.0};
  CHECK(jack_C(Partition{2}, 2.0, ones) == doctest::Approx(8.0 / 3.0));
  CHECK(jack_C(Partition{1, 1}, 2.0, ones) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("jack_C two-variable generating-function oracle") {
  Rng rng(21);
  for (double alpha : {1.0, 2.0, 0.7}) {
    for (int k = 0; k <= 10; ++k) {
      for (const Partition& lam : partitions(k, 2)) {
        const double x1 = rng.symmetric_uniform() * 2, x2 = rng.symmetric_uniform() * 2;
        const std::vector<double> xi{x1, x2};
        const double expected = two_variable_C(lam, alpha, x1, x2);
        CHECK(jack_C(lam, alpha, xi) == doctest::Approx(expected).epsilon(1e-10).scale(1.0));
      }
    }
  }
}

TEST_CASE("jack_C alpha = 1 equals scaled Schur functions") {
  Rng rng(22);
  for (int q = 1; q <= 4; ++q) {
    for (int k = 0; k <= 7; ++k) {
      std::vector<double> xi(q);
      for (int i = 0; i < q; ++i) xi[i] = 0.3 * (i + 1) + 0.2 * rng.uniform();
      for (const Partition& lam : partitions(k, q)) {
        CHECK(jack_C(lam, 1.0, xi) == doctest::Approx(schur_C(lam, xi)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("jack_C symmetric and homogeneous") {
  Rng rng(23);
  for (double alpha : {1.0, 2.0}) {
    std::vector<double> xi{0.4, -0.9, 1.3};
    std::vector<double> perm{1.3, 0.4, -0.9};
    const double c = 0.3 + 2 * rng.uniform();
    std::vector<double> scaled{c * 0.4, c * -0.9, c * 1.3};
    for (const Partition& lam : partitions(5, 3)) {
      const double v = jack_C(lam, alpha, xi);
      CHECK(jack_C(lam, alpha, perm) == doctest::Approx(v).epsilon(1e-12));
      CHECK(jack_C(lam, alpha, scaled) == doctest::Approx(std::pow(c, 5) * v).epsilon(1e-12));
    }
  }
}

TEST_CASE("trace identity for zonal polynomials") {
  Rng rng(24);
  for (int d = 1; d <= 2; ++d) {
    for (int q = 1; q <= 3; ++q) {
      const HypergroupParams p(q, d, 10.0);
      for (int t = 0; t < 30; ++t) {
        // tr x near 0 leaves nothing to be relative to; such draws are redrawn
        HermitianMatrix x = random_hermitian(q, d, rng);
        while (std::abs(x.trace()) < 0.1 * x.norm()) x = random_hermitian(q, d, rng);
        const double tr = x.trace();
        const auto xi = spectrum(x);
        for (int k = 0; k <= 6; ++k) {
          const auto layer = jack_C_layer(k, p.alpha(), xi);
          const double sum = std::accumulate(layer.begin(), layer.end(), 0.0);
          CHECK(std::abs(sum - std::pow(tr, k)) <= 1e-8 * std::max(std::abs(std::pow(tr, k)), 1e-300));
        }
        CHECK(zonal_Z(p, Partition{1}, x) == doctest::Approx(tr));
      }
    }
  }
}

TEST_CASE("zonal polynomials are unitarily invariant") {
  Rng rng(25);
  const HypergroupParams p(3, 2, 10.0);
  const HermitianMatrix x = random_hermitian(3, 2, rng);
  const SquareMatrix u = random_unitary(3, 2, rng);
  const HermitianMatrix y = HermitianMatrix::congruence(u, x);
  for (const Partition& lam : partitions(4, 3)) {
    CHECK(zonal_Z(p, lam, y) == doctest::Approx(zonal_Z(p, lam, x)).epsilon(1e-10));
  }
}

TEST_CASE("bessel_J basics") {
  const HypergroupParams p(2, 2, 5.0);
  const auto zero = bessel_J(p, p.mu(), HermitianMatrix(2, 2), 1e-12);
  CHECK(zero.value == 1.0);
  CHECK(zero.degree_used == 0);
  CHECK(zero.truncation_bound == 0.0);
  const HypergroupParams one(1, 1, 2.0);
  for (double x : {0.1, 1.0, 4.0, -3.0, 12.0}) {
    const auto e = bessel_J(one, 2.3, HermitianMatrix::diagonal(1, {x}), 1e-13);
    CHECK(e.value == doctest::Approx(scalar_series(2.3, x)).epsilon(1e-12).scale(1.0));
    CHECK(e.truncation_bound <= 1e-13);
  }
}

TEST_CASE("bessel_J two-variable oracle sum") {
  Rng rng(26);
  for (int d = 1; d <= 2; ++d) {
    const HypergroupParams p(2, d, 3.5);
    for (int t = 0; t < 10; ++t) {
      const double x1 = 3 * rng.symmetric_uniform(), x2 = 3 * rng.symmetric_uniform();
      double sum = 0.0;
      for (int k = 0; k <= 40; ++k) {
        for (const Partition& lam : partitions(k, 2)) {
          sum += std::pow(-1.0, k) * two_variable_C(lam, p.alpha(), x1, x2) /
                 (pochhammer_general(p, p.mu(), lam) * factorial(k));
        }
      }
      const auto e = bessel_J(p, p.mu(), HermitianMatrix::diagonal(d, {x1, x2}), 1e-13);
      CHECK(e.value == doctest::Approx(sum).epsilon(1e-11).scale(1.0));
    }
  }
}

TEST_CASE("bessel_J linear term") {
  Rng rng(27);
  for (int d = 1; d <= 2; ++d) {
    const HypergroupParams p(3, d, 7.0);
    const HermitianMatrix x = random_hermitian(3, d, rng);
    const double t = 1e-5;
    const double v = bessel_J(p, p.mu(), t * x, 1e-15).value;
    CHECK((1 - v) / t == doctest::Approx(x.trace() / p.mu()).epsilon(1e-4));
  }
}

TEST_CASE("bessel_J truncation is monotone") {
  Rng rng(28);
  for (int d = 1; d <= 2; ++d) {
    const HypergroupParams p(3, d, 8.0);
    for (int t = 0; t < 10; ++t) {
      const HermitianMatrix x = random_hermitian(3, d, rng, 3.0);
      const auto coarse = bessel_J(p, p.mu(), x, 1e-6);
      const auto fine = bessel_J(p, p.mu(), x, 1e-14);
      REQUIRE(fine.degree_used >= coarse.degree_used + 2);
      CHECK(std::abs(fine.value - coarse.value) <= coarse.truncation_bound);
    }
  }
}

TEST_CASE("bessel_J cap") {
  const HypergroupParams p(2, 1, 3.0);
  CHECK_THROWS_AS(bessel_J(p, p.mu(), HermitianMatrix::diagonal(1, {400.0, 300.0}), 1e-12),
                  SeriesCapError);
}

TEST_CASE("characters: rank one, symmetry, normalisation") {
  Rng rng(29);
  const HypergroupParams one(1, 1, 2.6);
  for (int t = 0; t < 50; ++t) {
    const double s = 3 * rng.uniform(), r = 3 * rng.uniform();
    const double z = s * r;
    const double nu = one.mu() - 1;
    const double expected = z == 0 ? 1.0 : std::tgamma(nu + 1) * std::pow(z / 2, -nu) * std::cyl_bessel_j(nu, z);
    const double got = character_phi(one, ConePoint::diagonal(1, {s}), ConePoint::diagonal(1, {r}));
    CHECK(std::abs(got - expected) <= 1e-10);
  }
  for (int d = 1; d <= 2; ++d) {
    const HypergroupParams p(3, d, 3 * d + 1.0);
    for (int t = 0; t < 10; ++t) {
      const ConePoint s = random_cone_point(3, d, rng, 1.5);
      const ConePoint r = random_cone_point(3, d, rng, 1.5);
      CHECK(character_phi(p, s, r) == doctest::Approx(character_phi(p, r, s)).epsilon(1e-10).scale(1.0));
      CHECK(character_phi(p, ConePoint::zero(3, d), r) == 1.0);
      CHECK(character_phi(p, s, ConePoint::zero(3, d)) == 1.0);
    }
  }
}

TEST_CASE("character restriction to a corner block") {
  Rng rng(30);
  for (int d = 1; d <= 2; ++d) {
    const HypergroupParams big(3, d, 3 * d + 2.0);
    const HypergroupParams small(2, d, big.mu());
    const HermitianMatrix r = random_hermitian(2, d, rng, 2.0);
    MatrixStorage embedded = MatrixStorage::Zero(3, 3);
    embedded.topLeftCorner(2, 2) = r.data();
    const double lhs = bessel_J(big, big.mu(), hermitian_from_storage(d, embedded), 1e-14).value;
    const double rhs = bessel_J(small, small.mu(), r, 1e-14).value;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12).scale(1.0));
  }
}
