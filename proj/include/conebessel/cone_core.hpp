#pragma once

// Field-generic Hermitian matrix arithmetic on the cone of positive
// semidefinite q x q matrices over R (d = 1) or C (d = 2).

#include <complex>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "conebessel/partition.hpp"

namespace conebessel {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or inputs outside an operation's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

using Complex = std::complex<double>;

inline constexpr int kMaxDim = 8;
inline constexpr double kPsdTolerance = 1e-9;

using MatrixStorage =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using RealVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

/// Which index range a parameter set must satisfy.
enum class IndexRange {
  hypergroup,  ///< mu > rho - 1: the convolution exists
  wishart,     ///< mu > (d/2)(q-1): Wishart laws and Bessel series only
};

/// Index data (q, d, mu) of the hypergroup X_{q,mu} plus derived constants.
class HypergroupParams {
 public:
  HypergroupParams(int q, int d, double mu, IndexRange range = IndexRange::hypergroup);

  int q() const { return q_; }
  int d() const { return d_; }
  double mu() const { return mu_; }
  /// rho = d(q - 1/2) + 1
  double rho() const { return d_ * (q_ - 0.5) + 1.0; }
  /// Real dimension of H_q.
  double n() const { return q_ + 0.5 * d_ * q_ * (q_ - 1); }
  /// gamma = mu - n/q, the exponent of the Haar density.
  double gamma() const { return mu_ - n() / q_; }
  /// Jack index alpha = 2/d.
  double alpha() const { return 2.0 / d_; }

  bool is_hypergroup_index() const { return mu_ > rho() - 1.0; }
  /// Throws DomainError unless mu > rho - 1.
  void require_hypergroup() const;

  std::string to_string() const;

  friend bool operator==(const HypergroupParams&, const HypergroupParams&) = default;

 private:
  int q_;
  int d_;
  double mu_;
};

/// General q x q matrix over F (M_q). Entries are stored complex; for d = 1
/// every imaginary part is zero.
class SquareMatrix {
 public:
  SquareMatrix(int q, int d);
  SquareMatrix(int d, MatrixStorage m);

  static SquareMatrix identity(int q, int d);

  int q() const { return static_cast<int>(m_.rows()); }
  int d() const { return d_; }
  const MatrixStorage& data() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }
  void set(int i, int j, Complex value);

  SquareMatrix adjoint() const { return {d_, m_.adjoint()}; }
  double frobenius_norm() const { return m_.norm(); }
  /// Largest singular value.
  double spectral_norm() const;
  /// Smallest singular value.
  double min_singular_value() const;
  bool is_unitary(double tol = 1e-12) const;

  friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b);
  friend SquareMatrix operator+(const SquareMatrix& a, const SquareMatrix& b);
  friend SquareMatrix operator-(const SquareMatrix& a, const SquareMatrix& b);
  friend SquareMatrix operator*(double c, const SquareMatrix& a) { return {a.d_, c * a.m_}; }

 private:
  int d_;
  MatrixStorage m_;
};

/// Element of H_q: conjugate-symmetric with real diagonal.
class HermitianMatrix {
 public:
  HermitianMatrix(int q, int d);
  /// Symmetrises m after checking |m - m*| <= tol (1 + |m|).
  explicit HermitianMatrix(const SquareMatrix& m, double tol = 1e-10);

  static HermitianMatrix identity(int q, int d);
  static HermitianMatrix diagonal(int d, const std::vector<double>& diag);
  /// a * a^* is Hermitian by construction.
  static HermitianMatrix gram(const SquareMatrix& a);
  /// a * h * a^*.
  static HermitianMatrix congruence(const SquareMatrix& a, const HermitianMatrix& h);

  int q() const { return m_.q(); }
  int d() const { return m_.d(); }
  const SquareMatrix& matrix() const { return m_; }
  const MatrixStorage& data() const { return m_.data(); }
  Complex operator()(int i, int j) const { return m_(i, j); }

  double trace() const;
  double determinant() const;
  /// ||x|| = (Re tr(x^* x))^{1/2}.
  double norm() const { return m_.frobenius_norm(); }

  friend HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b);
  friend HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b);
  friend HermitianMatrix operator*(double c, const HermitianMatrix& a);
  /// Product of two Hermitian matrices (not Hermitian in general).
  friend SquareMatrix operator*(const HermitianMatrix& a, const HermitianMatrix& b) {
    return a.m_ * b.m_;
  }

 private:
  struct Trusted {};
  HermitianMatrix(Trusted, SquareMatrix m) : m_(std::move(m)) {}
  friend class ConePoint;
  friend HermitianMatrix hermitian_from_storage(int d, const MatrixStorage& m);

  SquareMatrix m_;
};

/// Symmetrises an already (numerically) Hermitian storage without checks.
HermitianMatrix hermitian_from_storage(int d, const MatrixStorage& m);

/// (x|y) = Re tr(x^* y).
double inner(const HermitianMatrix& x, const HermitianMatrix& y);

struct HermitianEigen {
  RealVector values;  ///< ascending
  SquareMatrix basis;  ///< unitary; columns are eigenvectors
};

/// Cyclic Jacobi eigendecomposition. Throws ConvergenceError when the
/// sweep budget is exhausted.
HermitianEigen eig_herm(const HermitianMatrix& h);

/// Reassembles basis * diag(f(values)) * basis^*.
template <class F>
HermitianMatrix spectral_apply(const HermitianEigen& e, F&& f) {
  const auto& u = e.basis.data();
  MatrixStorage scaled = u;
  for (int j = 0; j < u.cols(); ++j) scaled.col(j) *= f(e.values(j));
  return hermitian_from_storage(e.basis.d(), scaled * u.adjoint());
}

/// Element of Pi_q (positive semidefinite). Eigenvalues in
/// [-kPsdTolerance (1 + ||h||), 0) are clamped to zero on construction.
class ConePoint {
 public:
  ConePoint(int q, int d) : h_(q, d) {}
  explicit ConePoint(const HermitianMatrix& h);

  static ConePoint identity(int q, int d);
  static ConePoint diagonal(int d, const std::vector<double>& diag);
  static ConePoint zero(int q, int d) { return ConePoint(q, d); }

  int q() const { return h_.q(); }
  int d() const { return h_.d(); }
  const HermitianMatrix& hermitian() const { return h_; }
  const MatrixStorage& data() const { return h_.data(); }
  Complex operator()(int i, int j) const { return h_(i, j); }
  double norm() const { return h_.norm(); }
  double trace() const { return h_.trace(); }
  double determinant() const { return h_.determinant(); }
  /// x^2 as a cone point.
  ConePoint squared() const;

  /// Builds from a decomposition, clamping eigenvalues as above.
  static ConePoint from_eigen(const HermitianEigen& e);

  operator const HermitianMatrix&() const { return h_; }

 private:
  struct Trusted {};
  ConePoint(Trusted, HermitianMatrix h) : h_(std::move(h)) {}

  HermitianMatrix h_;
};

/// Unique PSD square root. Throws DomainError if s has an eigenvalue
/// below -kPsdTolerance (1 + ||s||).
ConePoint psd_sqrt(const HermitianMatrix& s);

/// True iff lambda_min(b - a) >= -tol.
bool loewner_leq(const HermitianMatrix& a, const HermitianMatrix& b, double tol);

/// Delta_lambda(x) = Delta_1^{l1-l2} ... Delta_q^{lq} over leading principal minors.
double power_function(const HermitianMatrix& x, const Partition& lam);

/// Leading principal minor of order k (1-based).
double principal_minor(const HermitianMatrix& x, int k);

/// Generalised Pochhammer symbol prod_j (mu - (d/2)(j-1))_{lambda_j}.
double pochhammer_general(const HypergroupParams& p, double mu, const Partition& lam);

/// Gamma_Omega(mu) = (2 pi)^{(n-q)/2} prod_j Gamma(mu - (d/2)(j-1)).
double gamma_cone(const HypergroupParams& p, double mu);
double log_gamma_cone(const HypergroupParams& p, double mu);

/// pi^{q mu} / Gamma_Omega(mu): the constant in front of the Haar measure
/// omega_mu(f) = c * int_{Omega} f(sqrt r) Delta(r)^gamma dr.
double haar_constant(const HypergroupParams& p);

/// Text format: "q d" header, then q*q lines of d reals, row-major.
SquareMatrix read_matrix(std::istream& in);
void write_matrix(std::ostream& out, const SquareMatrix& m);
SquareMatrix load_matrix(const std::string& path);

}  // namespace conebessel
