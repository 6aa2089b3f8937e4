#include "conebessel/hypergroup_algebra.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "conebessel/jack_series.hpp"
#include "conebessel/random_matrix.hpp"

namespace conebessel {

namespace {

MatrixStorage blockdiag(const MatrixStorage& small, int q) {
  MatrixStorage m = MatrixStorage::Zero(q, q);
  m.topLeftCorner(small.rows(), small.cols()) = small;
  return m;
}

Estimate mean_of(const std::vector<double>& values) {
  RunningMean acc;
  for (double v : values) acc.add(v);
  return acc.estimate();
}

}  // namespace

bool Automorphism::invertible() const {
  return a_.min_singular_value() > 1e-12 * a_.spectral_norm();
}

ConePoint project_quotient(const Automorphism& t, const ConePoint& r) {
  const auto& a = t.matrix();
  if (a.q() != r.q() || a.d() != r.d()) throw DomainError("automorphism: shape mismatch");
  return psd_sqrt(HermitianMatrix::congruence(a, r.squared()));
}

ConePoint automorphism_apply(const Automorphism& t, const ConePoint& r) {
  if (!t.invertible()) throw DomainError("automorphism_apply: matrix is singular; use project_quotient");
  return project_quotient(t, r);
}

int numerical_rank(const SquareMatrix& a, double rel) {
  Eigen::JacobiSVD<MatrixStorage> svd(a.data());
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) rank += sv(i) > rel * sv(0);
  return rank;
}

Subhypergroup::Subhypergroup(int k, SquareMatrix u) : k_(k), u_(std::move(u)) {
  if (k < 0 || k > u_.q()) throw DomainError("subhypergroup: need 0 <= k <= q");
  if (!u_.is_unitary(1e-12)) throw DomainError("subhypergroup: u is not unitary");
}

ConePoint embed_sub(const Subhypergroup& h, const ConePoint& r_small) {
  if (r_small.q() != h.k() || r_small.d() != h.u().d()) throw DomainError("embed_sub: shape mismatch");
  const auto& u = h.u().data();
  const MatrixStorage m = u * blockdiag(r_small.data(), h.u().q()) * u.adjoint();
  return ConePoint(hermitian_from_storage(h.u().d(), m));
}

double distance_from_sub(const Subhypergroup& h, const ConePoint& z) {
  const auto& u = h.u().data();
  MatrixStorage m = u.adjoint() * z.data() * u;
  m.topLeftCorner(h.k(), h.k()).setZero();
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

ConePoint restrict_to_sub(const Subhypergroup& h, const ConePoint& z) {
  const auto& u = h.u().data();
  const MatrixStorage m = u.adjoint() * z.data() * u;
  return ConePoint(hermitian_from_storage(z.d(), m.topLeftCorner(h.k(), h.k())));
}

Estimate fourier_empirical(const HypergroupParams& p, const EmpiricalMeasure& m, const ConePoint& s,
                           double series_tol) {
  std::vector<double> values;
  values.reserve(m.size());
  for (const ConePoint& x : m.points) values.push_back(character_phi(p, s, x, series_tol));
  return weighted_mean(values, m.weights);
}

EmpiricalMeasure pushforward(const Automorphism& t, const EmpiricalMeasure& m) {
  EmpiricalMeasure out = m;
  for (ConePoint& x : out.points) x = project_quotient(t, x);
  return out;
}

ConePoint transpose(const ConePoint& x) {
  return ConePoint(hermitian_from_storage(x.d(), x.data().transpose()));
}

std::vector<ConePoint> default_s_grid(int q, int d, int count, double scale) {
  Rng rng(0x5eedULL + static_cast<std::uint64_t>(100 * q + d));
  std::vector<ConePoint> grid;
  for (int k = 0; k < count; ++k) {
    const double c = scale * (k + 1) / count;
    std::vector<double> diag(static_cast<std::size_t>(q));
    for (double& l : diag) l = c * (0.5 + rng.uniform());
    const SquareMatrix u = random_unitary(q, d, rng);
    grid.emplace_back(HermitianMatrix::congruence(u, HermitianMatrix::diagonal(d, diag)));
  }
  return grid;
}

LawComparison compare_laws(const HypergroupParams& p, const std::vector<ConePoint>& a,
                           const std::vector<ConePoint>& b, const std::vector<ConePoint>& s_grid,
                           double eps, bool paired) {
  if (paired && a.size() != b.size()) throw DomainError("compare_laws: paired samples differ in size");
  LawComparison out;
  auto add = [&](std::string name, auto&& statistic) {
    std::vector<double> va, vb;
    va.reserve(a.size());
    vb.reserve(b.size());
    for (const ConePoint& z : a) va.push_back(statistic(z));
    for (const ConePoint& z : b) vb.push_back(statistic(z));
    PanelEntry e{std::move(name), mean_of(va), mean_of(vb), 0.0};
    if (paired) {
      std::vector<double> diff(va.size());
      for (std::size_t i = 0; i < va.size(); ++i) diff[i] = va[i] - vb[i];
      e.z = one_sample_z(mean_of(diff), 0.0);
    } else {
      e.z = std::abs(two_sample_z(e.a, e.b));
    }
    out.max_z = std::max(out.max_z, e.z);
    out.entries.push_back(std::move(e));
  };
  add("tr", [](const ConePoint& z) { return z.trace(); });
  add("tr_sq", [](const ConePoint& z) { return z.squared().trace(); });
  add("log_det_eps", [&](const ConePoint& z) {
    return std::log((z.hermitian() + eps * HermitianMatrix::identity(z.q(), z.d())).determinant());
  });
  for (std::size_t k = 0; k < s_grid.size(); ++k) {
    add("phi_" + std::to_string(k), [&](const ConePoint& z) { return character_phi(p, s_grid[k], z, 1e-10); });
  }
  return out;
}

FourierPanel fourier_panel(const HypergroupParams& p, const EmpiricalMeasure& m,
                           const std::vector<ConePoint>& grid, const std::vector<double>& target) {
  if (grid.size() != target.size()) throw DomainError("fourier_panel: grid and target sizes differ");
  FourierPanel out;
  out.grid = grid;
  out.target = target;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Estimate e = fourier_empirical(p, m, grid[k]);
    out.empirical.push_back(e);
    out.max_z = std::max(out.max_z, one_sample_z(e, target[k]));
    out.max_abs_deviation = std::max(out.max_abs_deviation, std::abs(e.value - target[k]));
  }
  return out;
}

LawComparison transpose_automorphism_check(const HypergroupParams& p, const ConePoint& x,
                                           const ConePoint& y, std::size_t n, Rng& rng,
                                           const std::vector<ConePoint>& s_grid) {
  if (p.d() != 2) throw DomainError("transpose_automorphism_check: needs d = 2");
  const ConePoint tx = transpose(x);
  const ConePoint ty = transpose(y);
  std::vector<ConePoint> a, b;
  a.reserve(n);
  b.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const BallPoint v = sample_ball(p, rng);
    a.push_back(transpose(conv_point(x, y, v)));
    b.push_back(conv_point(tx, ty, v));
  }
  return compare_laws(p, a, b, s_grid, 1e-3, true);
}

}  // namespace conebessel
