#include "conebessel/random_matrix.hpp"

#include <cmath>
#include <numbers>

namespace conebessel {

SquareMatrix gaussian_matrix(int q, int d, Rng& rng) {
  SquareMatrix g(q, d);
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) {
      const double re = rng.normal();
      const double im = d == 2 ? rng.normal() : 0.0;
      g.set(i, j, {re, im});
    }
  }
  return g;
}

HermitianMatrix random_hermitian(int q, int d, Rng& rng, double scale) {
  const SquareMatrix g = gaussian_matrix(q, d, rng);
  return hermitian_from_storage(d, 0.5 * scale * (g.data() + g.data().adjoint()));
}

ConePoint random_cone_point(int q, int d, Rng& rng, double scale) {
  const SquareMatrix g = gaussian_matrix(q, d, rng);
  return ConePoint((scale / q) * HermitianMatrix::gram(g));
}

SquareMatrix random_unitary(int q, int d, Rng& rng) {
  MatrixStorage u = eig_herm(random_hermitian(q, d, rng)).basis.data();
  for (int j = 0; j < q; ++j) {
    if (d == 2) {
      u.col(j) *= std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
    } else if (rng.uniform() < 0.5) {
      u.col(j) *= -1.0;
    }
  }
  return {d, u};
}

}  // namespace conebessel

namespace conebessel {

SquareMatrix bartlett_factor(int q, int d, double shape, Rng& rng) {
  const double last = shape - 0.5 * d * (q - 1);
  if (!(last > 0.0)) {
    throw DomainError("bartlett: shape " + std::to_string(shape) + " must exceed (d/2)(q-1) = " +
                      std::to_string(0.5 * d * (q - 1)));
  }
  SquareMatrix t(q, d);
  for (int j = 0; j < q; ++j) {
    t.set(j, j, std::sqrt(rng.gamma(shape - 0.5 * d * j, 2.0)));
    for (int i = j + 1; i < q; ++i) {
      const double re = rng.normal();
      const double im = d == 2 ? rng.normal() : 0.0;
      t.set(i, j, {re, im});
    }
  }
  return t;
}

}  // namespace conebessel
