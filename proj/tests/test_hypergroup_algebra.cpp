#include <cmath>

#include "conebessel/hypergroup_algebra.hpp"
#include "conebessel/jack_series.hpp"
#include "conebessel/random_matrix.hpp"
#include "doctest.h"

using namespace conebessel;

namespace {

SquareMatrix well_conditioned(int q, int d, Rng& rng) {
  return SquareMatrix::identity(q, d) + 0.3 * gaussian_matrix(q, d, rng);
}

double gap(const ConePoint& a, const ConePoint& b) { return (a.hermitian() - b.hermitian()).norm(); }

}  // namespace

TEST_CASE("automorphisms: identity and group law") {
  Rng rng(201);
  for (int d = 1; d <= 2; ++d) {
    for (int q = 1; q <= 3; ++q) {
      const ConePoint r = random_cone_point(q, d, rng);
      CHECK(gap(automorphism_apply(Automorphism(SquareMatrix::identity(q, d)), r), r) < 1e-12);
      for (int t = 0; t < 20; ++t) {
        const SquareMatrix a = well_conditioned(q, d, rng);
        const SquareMatrix b = well_conditioned(q, d, rng);
        const ConePoint lhs = automorphism_apply(Automorphism(a), automorphism_apply(Automorphism(b), r));
        const ConePoint rhs = automorphism_apply(Automorphism(a * b), r);
        CHECK(gap(lhs, rhs) < 1e-10 * (1 + r.norm()));
      }
    }
  }
  CHECK_THROWS_AS(automorphism_apply(Automorphism(SquareMatrix(2, 1)), ConePoint::identity(2, 1)), DomainError);
}

TEST_CASE("automorphisms act dually on characters") {
  Rng rng(202);
  for (int d = 1; d <= 2; ++d) {
    const HypergroupParams p(3, d, 3 * d + 1.0);
    for (int t = 0; t < 10; ++t) {
      const SquareMatrix a = well_conditioned(3, d, rng);
      const ConePoint r = random_cone_point(3, d, rng, 0.8);
      const ConePoint s = random_cone_point(3, d, rng, 0.8);
      const double lhs = character_phi(p, s, automorphism_apply(Automorphism(a), r));
      const double rhs = character_phi(p, automorphism_apply(Automorphism(a).adjoint(), s), r);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("fourier transforms of empirical measures") {
  Rng rng(203);
  const HypergroupParams p(2, 2, 4.0);
  const auto point = EmpiricalMeasure::uniform(p, {ConePoint::zero(2, 2)}, 0);
  const Estimate e = fourier_empirical(p, point, random_cone_point(2, 2, rng));
  CHECK(e.value == 1.0);
  std::vector<ConePoint> pts;
  for (int k = 0; k < 200; ++k) pts.push_back(random_cone_point(2, 2, rng, 0.5));
  const auto m = EmpiricalMeasure::uniform(p, pts, 1);
  const Automorphism t(well_conditioned(2, 2, rng));
  for (int k = 0; k < 5; ++k) {
    const ConePoint s = random_cone_point(2, 2, rng, 0.4);
    const double lhs = fourier_empirical(p, pushforward(t, m), s).value;
    const double rhs = fourier_empirical(p, m, automorphism_apply(t.adjoint(), s)).value;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("subhypergroups") {
  Rng rng(204);
  const HypergroupParams p(3, 2, 7.0);
  const ConePoint r = random_cone_point(3, 2, rng);
  CHECK(gap(embed_sub(Subhypergroup(3, SquareMatrix::identity(3, 2)), r), r) < 1e-14);
  CHECK_THROWS_AS(Subhypergroup(2, 2.0 * SquareMatrix::identity(3, 2)), DomainError);
  for (int k = 1; k <= 2; ++k) {
    const Subhypergroup h(k, random_unitary(3, 2, rng));
    const HypergroupParams small(k, 2, p.mu());
    const ConePoint x = embed_sub(h, random_cone_point(k, 2, rng));
    const ConePoint y = embed_sub(h, random_cone_point(k, 2, rng));
    for (int t = 0; t < 500; ++t) CHECK(distance_from_sub(h, conv_sample(p, x, y, rng)) < 1e-9);
    // characters restrict to characters of the smaller cone
    const ConePoint s_small = random_cone_point(k, 2, rng);
    const ConePoint r_small = random_cone_point(k, 2, rng);
    const double big = character_phi(p, embed_sub(h, s_small), embed_sub(h, r_small));
    CHECK(big == doctest::Approx(character_phi(small, s_small, r_small)).epsilon(1e-10).scale(1.0));
    // H_{k,u} inside H_{k+1,u}
    const Subhypergroup bigger(k + 1, h.u());
    CHECK(distance_from_sub(bigger, x) < 1e-12);
  }
}

TEST_CASE("quotient projections") {
  Rng rng(205);
  const HypergroupParams p(3, 1, 4.0);
  const ConePoint r = random_cone_point(3, 1, rng);
  CHECK(project_quotient(Automorphism(SquareMatrix(3, 1)), r).norm() == 0.0);
  SquareMatrix a(3, 1);
  a.set(0, 0, 1.0);
  a.set(1, 1, 1.0);
  CHECK(numerical_rank(a) == 2);
  // kernel: cone points living on the last coordinate
  SquareMatrix perm(3, 1);
  perm.set(0, 2, 1.0);
  perm.set(1, 1, 1.0);
  perm.set(2, 0, 1.0);
  const Subhypergroup kernel(1, perm);
  CHECK(project_quotient(Automorphism(a), embed_sub(kernel, ConePoint::diagonal(1, {2.5}))).norm() == 0.0);
  // homomorphism in law: T_a(x * y) against T_a x * T_a y on the leading block
  const Subhypergroup lead(2, SquareMatrix::identity(3, 1));
  const HypergroupParams small(2, 1, p.mu());
  const ConePoint x = random_cone_point(3, 1, rng);
  const ConePoint y = random_cone_point(3, 1, rng);
  const ConePoint tx = restrict_to_sub(lead, project_quotient(Automorphism(a), x));
  const ConePoint ty = restrict_to_sub(lead, project_quotient(Automorphism(a), y));
  std::vector<ConePoint> lhs, rhs;
  for (int k = 0; k < 20000; ++k) {
    lhs.push_back(restrict_to_sub(lead, project_quotient(Automorphism(a), conv_sample(p, x, y, rng))));
    rhs.push_back(conv_sample(small, tx, ty, rng));
  }
  const auto cmp = compare_laws(small, lhs, rhs, default_s_grid(2, 1, 4, 1.0));
  CHECK(cmp.consistent());
}

TEST_CASE("transpose automorphism for the complex cone") {
  Rng rng(206);
  const HypergroupParams one(1, 2, 2.0);
  const auto trivial = transpose_automorphism_check(one, ConePoint::diagonal(2, {1.0}),
                                                    ConePoint::diagonal(2, {0.5}), 2000, rng, default_s_grid(1, 2, 3, 1.0));
  CHECK(trivial.max_z == 0.0);
  const HypergroupParams p(2, 2, 4.0);
  const auto grid = default_s_grid(2, 2, 4, 1.0);
  const auto real_inputs = transpose_automorphism_check(p, ConePoint::diagonal(2, {1.0, 0.4}),
                                                        ConePoint::diagonal(2, {0.3, 0.9}), 5000, rng, grid);
  CHECK(real_inputs.consistent());
  const auto generic = transpose_automorphism_check(p, random_cone_point(2, 2, rng), random_cone_point(2, 2, rng),
                                                    5000, rng, grid);
  CHECK(generic.consistent());
  CHECK_THROWS_AS(transpose_automorphism_check(HypergroupParams(2, 1, 3.0), ConePoint::identity(2, 1),
                                               ConePoint::identity(2, 1), 10, rng, grid),
                  DomainError);
}

TEST_CASE("automorphisms commute with convolution in law") {
  Rng rng(207);
  const HypergroupParams p(2, 2, 3.5);
  const ConePoint x = random_cone_point(2, 2, rng);
  const ConePoint y = random_cone_point(2, 2, rng);
  const Automorphism t(well_conditioned(2, 2, rng));
  const ConePoint tx = automorphism_apply(t, x), ty = automorphism_apply(t, y);
  std::vector<ConePoint> lhs, rhs;
  for (int k = 0; k < 20000; ++k) {
    lhs.push_back(automorphism_apply(t, conv_sample(p, x, y, rng)));
    rhs.push_back(conv_sample(p, tx, ty, rng));
  }
  CHECK(compare_laws(p, lhs, rhs, default_s_grid(2, 2, 4, 0.8)).consistent());
}
