#pragma once

// Automorphisms T_a(r) = sqrt(a r^2 a^*), subhypergroups H_{k,u}, quotient
// projections and Fourier-Stieltjes transforms of sampled measures.

#include <string>
#include <vector>

#include "conebessel/ball_measure.hpp"
#include "conebessel/cone_core.hpp"
#include "conebessel/random.hpp"
#include "conebessel/statistics.hpp"

namespace conebessel {

/// Carries a matrix a; an automorphism when a is invertible, a homomorphic
/// projection otherwise.
class Automorphism {
 public:
  explicit Automorphism(SquareMatrix a) : a_(std::move(a)) {}
  const SquareMatrix& matrix() const { return a_; }
  /// sigma_min > 1e-12 sigma_max.
  bool invertible() const;
  Automorphism adjoint() const { return Automorphism(a_.adjoint()); }

 private:
  SquareMatrix a_;
};

/// sqrt(a r^2 a^*). Throws DomainError if a is singular (use project_quotient).
ConePoint automorphism_apply(const Automorphism& t, const ConePoint& r);

/// Same map without the invertibility requirement.
ConePoint project_quotient(const Automorphism& t, const ConePoint& r);

/// Number of singular values above rel * sigma_max.
int numerical_rank(const SquareMatrix& a, double rel = 1e-10);

/// H_{k,u} = { u blockdiag(r, 0) u^* : r in Pi_k }.
class Subhypergroup {
 public:
  Subhypergroup(int k, SquareMatrix u);
  int k() const { return k_; }
  const SquareMatrix& u() const { return u_; }

 private:
  int k_;
  SquareMatrix u_;
};

/// u blockdiag(r_small, 0) u^*.
ConePoint embed_sub(const Subhypergroup& h, const ConePoint& r_small);

/// Largest |entry| of u^* z u outside the leading k x k block.
double distance_from_sub(const Subhypergroup& h, const ConePoint& z);

/// Leading k x k block of u^* z u.
ConePoint restrict_to_sub(const Subhypergroup& h, const ConePoint& z);

/// Weighted mean of phi_s over the sample with delta-method error.
Estimate fourier_empirical(const HypergroupParams& p, const EmpiricalMeasure& m, const ConePoint& s,
                           double series_tol = 1e-10);

/// T_a applied pointwise; weights kept.
EmpiricalMeasure pushforward(const Automorphism& t, const EmpiricalMeasure& m);

/// Entrywise transpose; a hypergroup automorphism for d = 2.
ConePoint transpose(const ConePoint& x);

/// Deterministic grid of count points s = c_k u_k D_k u_k^* with c_k spread
/// over (0, scale].
std::vector<ConePoint> default_s_grid(int q, int d, int count, double scale);

struct PanelEntry {
  std::string name;
  Estimate a;
  Estimate b;
  double z = 0.0;
};

/// Two-sample comparison of laws on Pi_q through a fixed panel of statistics.
struct LawComparison {
  std::vector<PanelEntry> entries;
  double max_z = 0.0;
  bool consistent(double threshold = 3.0) const { return max_z <= threshold; }
};

/// Panel: tr z, tr z^2, log Delta(z + eps I), and phi_s(z) for s in s_grid.
/// Independent samples use the two-sample z; paired samples (a_i and b_i
/// from common random numbers) use the z of the mean difference.
LawComparison compare_laws(const HypergroupParams& p, const std::vector<ConePoint>& a,
                           const std::vector<ConePoint>& b, const std::vector<ConePoint>& s_grid,
                           double eps = 1e-3, bool paired = false);

/// Fourier panel against a closed form: z_k = |FT_k - target_k| / stderr_k.
struct FourierPanel {
  std::vector<ConePoint> grid;
  std::vector<Estimate> empirical;
  std::vector<double> target;
  double max_z = 0.0;
  double max_abs_deviation = 0.0;
  bool consistent(double threshold = 3.0) const { return max_z <= threshold; }
};

FourierPanel fourier_panel(const HypergroupParams& p, const EmpiricalMeasure& m,
                           const std::vector<ConePoint>& grid, const std::vector<double>& target);

/// Compares tau(delta_x * delta_y) with delta_{tau x} * delta_{tau y} (d = 2)
/// with both sides driven by the same ball draws.
LawComparison transpose_automorphism_check(const HypergroupParams& p, const ConePoint& x,
                                           const ConePoint& y, std::size_t n, Rng& rng,
                                           const std::vector<ConePoint>& s_grid);

}  // namespace conebessel
