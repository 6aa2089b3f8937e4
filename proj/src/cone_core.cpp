#include "conebessel/cone_core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include <Eigen/LU>

namespace conebessel {

namespace {

constexpr int kMaxSweeps = 64;

void check_field(int q, int d) {
  if (d == 4) throw DomainError("quaternion field (d = 4) is not supported");
  if (d != 1 && d != 2) throw DomainError("field dimension d must be 1 (real) or 2 (complex)");
  if (q < 1 || q > kMaxDim) {
    throw DomainError("matrix size q must lie in [1, " + std::to_string(kMaxDim) + "]");
  }
}

void check_same_shape(const SquareMatrix& a, const SquareMatrix& b) {
  if (a.q() != b.q() || a.d() != b.d()) throw DomainError("matrix shapes do not match");
}

// A <- G^* A G and V <- V G for the Jacobi rotation acting on (p, r) that
// annihilates A(p, r).
void jacobi_rotate(MatrixStorage& a, MatrixStorage& v, int p, int r) {
  const Complex apr = a(p, r);
  const double mag = std::abs(apr);
  const double app = a(p, p).real();
  const double arr = a(r, r).real();
  const double theta = (arr - app) / (2.0 * mag);
  double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  if (theta < 0.0) t = -t;
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const Complex phase = apr / mag;
  const Complex phase_bar = std::conj(phase);
  const int q = static_cast<int>(a.rows());

  for (int k = 0; k < q; ++k) {
    const Complex akp = a(k, p);
    const Complex akr = a(k, r);
    a(k, p) = c * akp - s * phase_bar * akr;
    a(k, r) = s * akp + c * phase_bar * akr;
  }
  for (int k = 0; k < q; ++k) {
    const Complex apk = a(p, k);
    const Complex ark = a(r, k);
    a(p, k) = c * apk - s * phase * ark;
    a(r, k) = s * apk + c * phase * ark;
  }
  a(p, r) = 0.0;
  a(r, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(r, r) = a(r, r).real();

  for (int k = 0; k < q; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkr = v(k, r);
    v(k, p) = c * vkp - s * phase_bar * vkr;
    v(k, r) = s * vkp + c * phase_bar * vkr;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// HypergroupParams

HypergroupParams::HypergroupParams(int q, int d, double mu, IndexRange range)
    : q_(q), d_(d), mu_(mu) {
  check_field(q, d);
  if (!std::isfinite(mu)) throw DomainError("index mu must be finite");
  const double wishart_floor = 0.5 * d * (q - 1);
  if (range == IndexRange::hypergroup) {
    require_hypergroup();
  } else if (!(mu > wishart_floor)) {
    throw DomainError("index mu must exceed (d/2)(q-1) = " + std::to_string(wishart_floor) +
                      " (got " + std::to_string(mu) + ")");
  }
}

void HypergroupParams::require_hypergroup() const {
  if (!is_hypergroup_index()) {
    std::ostringstream msg;
    msg << "index constraint mu > rho - 1 violated: mu = " << mu_ << ", rho - 1 = " << rho() - 1.0
        << " for q = " << q_ << ", d = " << d_;
    throw DomainError(msg.str());
  }
}

std::string HypergroupParams::to_string() const {
  std::ostringstream s;
  s << "q=" << q_ << " d=" << d_ << " mu=" << mu_;
  return s.str();
}

// ---------------------------------------------------------------------------
// SquareMatrix

SquareMatrix::SquareMatrix(int q, int d) : d_(d) {
  check_field(q, d);
  m_ = MatrixStorage::Zero(q, q);
}

SquareMatrix::SquareMatrix(int d, MatrixStorage m) : d_(d), m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw DomainError("matrix must be square");
  check_field(static_cast<int>(m_.rows()), d);
  if (d == 1) m_ = m_.real().cast<Complex>();
}

SquareMatrix SquareMatrix::identity(int q, int d) {
  check_field(q, d);
  return {d, MatrixStorage::Identity(q, q)};
}

void SquareMatrix::set(int i, int j, Complex value) {
  if (d_ == 1) value = value.real();
  m_(i, j) = value;
}

double SquareMatrix::spectral_norm() const {
  const HermitianEigen e = eig_herm(HermitianMatrix::gram(adjoint()));
  return std::sqrt(std::max(0.0, e.values(e.values.size() - 1)));
}

double SquareMatrix::min_singular_value() const {
  const HermitianEigen e = eig_herm(HermitianMatrix::gram(adjoint()));
  return std::sqrt(std::max(0.0, e.values(0)));
}

bool SquareMatrix::is_unitary(double tol) const {
  const MatrixStorage prod = m_.adjoint() * m_;
  return (prod - MatrixStorage::Identity(q(), q())).norm() <= tol * q();
}

SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
  check_same_shape(a, b);
  return {a.d_, a.m_ * b.m_};
}

SquareMatrix operator+(const SquareMatrix& a, const SquareMatrix& b) {
  check_same_shape(a, b);
  return {a.d_, a.m_ + b.m_};
}

SquareMatrix operator-(const SquareMatrix& a, const SquareMatrix& b) {
  check_same_shape(a, b);
  return {a.d_, a.m_ - b.m_};
}

// ---------------------------------------------------------------------------
// HermitianMatrix

HermitianMatrix::HermitianMatrix(int q, int d) : m_(q, d) {}

HermitianMatrix::HermitianMatrix(const SquareMatrix& m, double tol) : m_(m) {
  const MatrixStorage& a = m.data();
  const double asym = (a - a.adjoint()).norm();
  if (asym > tol * (1.0 + a.norm())) {
    throw DomainError("matrix is not Hermitian (|m - m*| = " + std::to_string(asym) + ")");
  }
  m_ = SquareMatrix(m.d(), 0.5 * (a + a.adjoint()));
}

HermitianMatrix hermitian_from_storage(int d, const MatrixStorage& m) {
  return {HermitianMatrix::Trusted{}, SquareMatrix(d, 0.5 * (m + m.adjoint()))};
}

HermitianMatrix HermitianMatrix::identity(int q, int d) {
  return {Trusted{}, SquareMatrix::identity(q, d)};
}

HermitianMatrix HermitianMatrix::diagonal(int d, const std::vector<double>& diag) {
  SquareMatrix m(static_cast<int>(diag.size()), d);
  for (std::size_t i = 0; i < diag.size(); ++i) m.set(static_cast<int>(i), static_cast<int>(i), diag[i]);
  return {Trusted{}, std::move(m)};
}

HermitianMatrix HermitianMatrix::gram(const SquareMatrix& a) {
  return hermitian_from_storage(a.d(), a.data() * a.data().adjoint());
}

HermitianMatrix HermitianMatrix::congruence(const SquareMatrix& a, const HermitianMatrix& h) {
  check_same_shape(a, h.matrix());
  return hermitian_from_storage(a.d(), a.data() * h.data() * a.data().adjoint());
}

double HermitianMatrix::trace() const { return data().trace().real(); }

double HermitianMatrix::determinant() const { return data().determinant().real(); }

HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
  return {HermitianMatrix::Trusted{}, a.m_ + b.m_};
}

HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
  return {HermitianMatrix::Trusted{}, a.m_ - b.m_};
}

HermitianMatrix operator*(double c, const HermitianMatrix& a) {
  return {HermitianMatrix::Trusted{}, c * a.m_};
}

double inner(const HermitianMatrix& x, const HermitianMatrix& y) {
  check_same_shape(x.matrix(), y.matrix());
  return (x.data().adjoint() * y.data()).trace().real();
}

// ---------------------------------------------------------------------------
// Spectral routines

HermitianEigen eig_herm(const HermitianMatrix& h) {
  const int q = h.q();
  MatrixStorage a = h.data();
  MatrixStorage v = MatrixStorage::Identity(q, q);
  const double scale = a.norm();
  // Off-diagonal entries at this level are dropped: their effect on the
  // reconstruction is far below the 1e-12 relative contract.
  const double negligible = 1e-2 * std::numeric_limits<double>::epsilon() * scale;

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (int p = 0; p < q; ++p) {
      for (int r = p + 1; r < q; ++r) {
        if (std::abs(a(p, r)) <= negligible) {
          a(p, r) = 0.0;
          a(r, p) = 0.0;
          continue;
        }
        jacobi_rotate(a, v, p, r);
        converged = false;
      }
    }
  }
  if (!converged) {
    throw ConvergenceError("Jacobi eigensolver did not converge within the sweep budget");
  }

  std::vector<int> order(q);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });

  RealVector values(q);
  MatrixStorage basis(q, q);
  for (int k = 0; k < q; ++k) {
    values(k) = a(order[k], order[k]).real();
    basis.col(k) = v.col(order[k]);
  }
  return {values, SquareMatrix(h.d(), basis)};
}

ConePoint::ConePoint(const HermitianMatrix& h) : h_(h) {
  *this = from_eigen(eig_herm(h));
}

ConePoint ConePoint::identity(int q, int d) { return {Trusted{}, HermitianMatrix::identity(q, d)}; }

ConePoint ConePoint::diagonal(int d, const std::vector<double>& diag) {
  for (double x : diag) {
    if (x < 0.0) throw DomainError("diagonal cone point needs nonnegative entries");
  }
  return {Trusted{}, HermitianMatrix::diagonal(d, diag)};
}

ConePoint ConePoint::from_eigen(const HermitianEigen& e) {
  const double top = e.values.cwiseAbs().maxCoeff();
  const double floor = -kPsdTolerance * (1.0 + top);
  if (e.values(0) < floor) {
    throw DomainError("matrix is not positive semidefinite (smallest eigenvalue " +
                      std::to_string(e.values(0)) + ")");
  }
  if (e.values(0) >= 0.0) {
    return {Trusted{}, spectral_apply(e, [](double x) { return x; })};
  }
  return {Trusted{}, spectral_apply(e, [](double x) { return std::max(x, 0.0); })};
}

ConePoint ConePoint::squared() const {
  return {Trusted{}, hermitian_from_storage(d(), data() * data())};
}

ConePoint psd_sqrt(const HermitianMatrix& s) {
  const HermitianEigen e = eig_herm(s);
  const double top = e.values.cwiseAbs().maxCoeff();
  if (e.values(0) < -kPsdTolerance * (1.0 + top)) {
    throw DomainError("psd_sqrt: input is not positive semidefinite (smallest eigenvalue " +
                      std::to_string(e.values(0)) + ")");
  }
  // Eigenvalues at rounding level are zero; this keeps rank-deficient
  // inputs rank-deficient after the square root.
  const double zero_level = 1e-14 * top;
  return ConePoint::from_eigen(
      {e.values.unaryExpr([&](double x) { return x <= zero_level ? 0.0 : std::sqrt(x); }),
       e.basis});
}

bool loewner_leq(const HermitianMatrix& a, const HermitianMatrix& b, double tol) {
  check_same_shape(a.matrix(), b.matrix());
  return eig_herm(b - a).values(0) >= -tol;
}

double principal_minor(const HermitianMatrix& x, int k) {
  if (k < 1 || k > x.q()) throw DomainError("principal_minor: order out of range");
  return x.data().topLeftCorner(k, k).determinant().real();
}

double power_function(const HermitianMatrix& x, const Partition& lam) {
  if (lam.length() > x.q()) throw DomainError("power_function: partition has more than q parts");
  double value = 1.0;
  for (int k = 1; k <= lam.length(); ++k) {
    const int exponent = lam[k - 1] - lam[k];
    if (exponent > 0) value *= std::pow(principal_minor(x, k), exponent);
  }
  return value;
}

double pochhammer_general(const HypergroupParams& p, double mu, const Partition& lam) {
  if (lam.length() > p.q()) throw DomainError("pochhammer_general: partition has more than q parts");
  double value = 1.0;
  for (int j = 0; j < lam.length(); ++j) {
    const double a = mu - 0.5 * p.d() * j;
    for (int i = 0; i < lam[j]; ++i) {
      const double factor = a + i;
      if (factor == 0.0) {
        throw DomainError("pochhammer_general: (mu)_lambda vanishes for lambda = " +
                          lam.to_string());
      }
      value *= factor;
    }
  }
  return value;
}

double log_gamma_cone(const HypergroupParams& p, double mu) {
  double value = 0.5 * (p.n() - p.q()) * std::log(2.0 * M_PI);
  for (int j = 0; j < p.q(); ++j) {
    const double arg = mu - 0.5 * p.d() * j;
    if (!(arg > 0.0)) {
      throw DomainError("gamma_cone: argument " + std::to_string(arg) + " is not positive");
    }
    value += std::lgamma(arg);
  }
  return value;
}

double gamma_cone(const HypergroupParams& p, double mu) { return std::exp(log_gamma_cone(p, mu)); }

double haar_constant(const HypergroupParams& p) {
  return std::exp(p.q() * p.mu() * std::log(M_PI) - log_gamma_cone(p, p.mu()));
}

// ---------------------------------------------------------------------------
// Text format

SquareMatrix read_matrix(std::istream& in) {
  int q = 0;
  int d = 0;
  if (!(in >> q >> d)) throw DomainError("matrix file: missing 'q d' header");
  SquareMatrix m(q, d);
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) {
      double re = 0.0;
      double im = 0.0;
      if (!(in >> re) || (d == 2 && !(in >> im))) {
        throw DomainError("matrix file: expected " + std::to_string(q * q) + " entries of " +
                          std::to_string(d) + " components, stopped at entry (" +
                          std::to_string(i) + "," + std::to_string(j) + ")");
      }
      m.set(i, j, {re, im});
    }
  }
  return m;
}

void write_matrix(std::ostream& out, const SquareMatrix& m) {
  out << m.q() << ' ' << m.d() << '\n';
  out.precision(17);
  for (int i = 0; i < m.q(); ++i) {
    for (int j = 0; j < m.q(); ++j) {
      out << m(i, j).real();
      if (m.d() == 2) out << ' ' << m(i, j).imag();
      out << '\n';
    }
  }
}

SquareMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open matrix file '" + path + "'");
  return read_matrix(in);
}

}  // namespace conebessel
