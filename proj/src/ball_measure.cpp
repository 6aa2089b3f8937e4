#include "conebessel/ball_measure.hpp"

#include <atomic>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include "conebessel/random_matrix.hpp"
#include "conebessel/version.hpp"

namespace conebessel {

namespace {

std::atomic<std::uint64_t> g_samples{0};
std::atomic<std::uint64_t> g_violations{0};
std::mutex g_worst_mutex;
double g_worst_excess = 0.0;

void audit(double excess) {
  g_samples.fetch_add(1, std::memory_order_relaxed);
  if (excess > kSupportSlack) {
    g_violations.fetch_add(1, std::memory_order_relaxed);
    std::lock_guard lock(g_worst_mutex);
    g_worst_excess = std::max(g_worst_excess, excess);
  }
}

/// Delta(I - v^* v), or a nonpositive value outside the open ball.
double ball_defect(const SquareMatrix& v) {
  const MatrixStorage g = MatrixStorage::Identity(v.q(), v.q()) - v.data().adjoint() * v.data();
  const HermitianEigen e = eig_herm(hermitian_from_storage(v.d(), g));
  if (e.values(0) <= 0.0) return 0.0;
  double det = 1.0;
  for (int i = 0; i < e.values.size(); ++i) det *= e.values(i);
  return det;
}

SquareMatrix uniform_box(int q, int d, Rng& rng) {
  SquareMatrix v(q, d);
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) {
      const double re = rng.symmetric_uniform();
      const double im = d == 2 ? rng.symmetric_uniform() : 0.0;
      v.set(i, j, {re, im});
    }
  }
  return v;
}

std::string entry_name(int i, int j, int c, int d) {
  std::string name = "m" + std::to_string(i) + std::to_string(j);
  if (d == 2) name += c == 0 ? "_re" : "_im";
  return name;
}

}  // namespace

BallPoint::BallPoint(SquareMatrix v) : v_(std::move(v)) {
  if (!(v_.spectral_norm() < 1.0)) throw DomainError("ball point must have spectral norm < 1");
}

EmpiricalMeasure EmpiricalMeasure::uniform(const HypergroupParams& p, std::vector<ConePoint> points,
                                           std::uint64_t seed) {
  EmpiricalMeasure m;
  m.q = p.q();
  m.d = p.d();
  m.mu = p.mu();
  m.weights.assign(points.size(), points.empty() ? 0.0 : 1.0 / static_cast<double>(points.size()));
  m.n_raw = points.size();
  m.points = std::move(points);
  m.seed = seed;
  return m;
}

void write_csv(std::ostream& out, const EmpiricalMeasure& m) {
  out << "# conebessel " << kVersion << " q=" << m.q << " d=" << m.d << " mu="
      << std::setprecision(17) << m.mu << " seed=" << m.seed << " n_raw=" << m.n_raw << "\n";
  for (int i = 0; i < m.q; ++i) {
    for (int j = 0; j < m.q; ++j) {
      for (int c = 0; c < m.d; ++c) out << entry_name(i, j, c, m.d) << ",";
    }
  }
  out << "weight\n";
  for (std::size_t k = 0; k < m.points.size(); ++k) {
    const auto& x = m.points[k];
    for (int i = 0; i < m.q; ++i) {
      for (int j = 0; j < m.q; ++j) {
        out << x(i, j).real() << ",";
        if (m.d == 2) out << x(i, j).imag() << ",";
      }
    }
    out << m.weights[k] << "\n";
  }
}

EmpiricalMeasure read_csv(std::istream& in) {
  EmpiricalMeasure m;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# conebessel", 0) != 0) {
    throw Error("csv: missing '# conebessel' metadata line");
  }
  {
    std::istringstream meta(line.substr(1));
    std::string token;
    bool have_q = false, have_d = false, have_mu = false;
    while (meta >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = token.substr(0, eq);
      const std::string value = token.substr(eq + 1);
      if (key == "q") m.q = std::stoi(value), have_q = true;
      else if (key == "d") m.d = std::stoi(value), have_d = true;
      else if (key == "mu") m.mu = std::stod(value), have_mu = true;
      else if (key == "seed") m.seed = std::stoull(value);
      else if (key == "n_raw") m.n_raw = std::stoull(value);
    }
    if (!have_q || !have_d || !have_mu) throw Error("csv: metadata must record q, d and mu");
    if (m.d != 1 && m.d != 2) throw DomainError("csv: d must be 1 or 2");
    if (m.q < 1 || m.q > kMaxDim) throw DomainError("csv: q out of range");
  }
  if (!std::getline(in, line)) throw Error("csv: missing column header");
  const int columns = m.q * m.q * m.d + 1;
  int row = 2;
  double total = 0.0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<double> values;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      try {
        values.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw Error("csv line " + std::to_string(row) + ": bad number '" + field + "'");
      }
    }
    if (static_cast<int>(values.size()) != columns) {
      throw Error("csv line " + std::to_string(row) + ": expected " + std::to_string(columns) +
                  " fields, got " + std::to_string(values.size()));
    }
    SquareMatrix x(m.q, m.d);
    int k = 0;
    for (int i = 0; i < m.q; ++i) {
      for (int j = 0; j < m.q; ++j) {
        const double re = values[static_cast<std::size_t>(k++)];
        const double im = m.d == 2 ? values[static_cast<std::size_t>(k++)] : 0.0;
        x.set(i, j, {re, im});
      }
    }
    m.points.emplace_back(HermitianMatrix(x, 1e-9));
    m.weights.push_back(values.back());
    total += values.back();
  }
  if (m.points.empty()) throw Error("csv: no samples");
  for (double& w : m.weights) w /= total;
  if (m.n_raw == 0) m.n_raw = m.points.size();
  return m;
}

BallPoint sample_ball(const HypergroupParams& p, Rng& rng) {
  p.require_hypergroup();
  const int q = p.q();
  const int d = p.d();
  const SquareMatrix x = gaussian_matrix(q, d, rng);
  const SquareMatrix t = bartlett_factor(q, d, p.mu() - 0.5 * q * d, rng);
  const MatrixStorage s = x.data().adjoint() * x.data() + t.data() * t.data().adjoint();
  const HermitianEigen e = eig_herm(hermitian_from_storage(d, s));
  const HermitianMatrix inv_sqrt = spectral_apply(e, [](double l) { return 1.0 / std::sqrt(l); });
  SquareMatrix v(d, x.data() * inv_sqrt.data());
  // rounding can put v on the boundary when B is tiny; shrink by one ulp-scale step
  const double norm = v.spectral_norm();
  if (!(norm < 1.0)) v = ((1.0 - 4 * std::numeric_limits<double>::epsilon()) / norm) * v;
  return BallPoint(std::move(v));
}

BallPoint sample_ball_rejection(const HypergroupParams& p, Rng& rng, std::uint64_t max_proposals) {
  p.require_hypergroup();
  if (p.mu() < p.rho()) {
    throw DomainError("sample_ball_rejection: density unbounded for mu < rho (" + p.to_string() + ")");
  }
  const double exponent = p.mu() - p.rho();
  for (std::uint64_t k = 0; k < max_proposals; ++k) {
    SquareMatrix v = uniform_box(p.q(), p.d(), rng);
    const double defect = ball_defect(v);
    if (defect <= 0.0) continue;
    if (rng.uniform() < std::pow(defect, exponent)) return BallPoint(std::move(v));
  }
  throw ConvergenceError("sample_ball_rejection: no acceptance in " + std::to_string(max_proposals) +
                         " proposals");
}

Estimate kappa(const HypergroupParams& p, std::size_t n_samples, Rng& rng) {
  p.require_hypergroup();
  const double exponent = p.mu() - p.rho();
  const double box = std::pow(2.0, p.d() * p.q() * p.q());
  RunningMean acc;
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double defect = ball_defect(uniform_box(p.q(), p.d(), rng));
    acc.add(defect > 0.0 ? box * std::pow(defect, exponent) : 0.0);
  }
  return acc.estimate();
}

double kappa_closed(const HypergroupParams& p) {
  p.require_hypergroup();
  const double shift = 0.5 * p.q() * p.d();
  return std::exp(0.5 * p.d() * p.q() * p.q() * std::log(std::numbers::pi) +
                  log_gamma_cone(p, p.mu() - shift) - log_gamma_cone(p, p.mu()));
}

bool BochnerEstimate::imaginary_consistent() const {
  return std::abs(imag.value) <= 3.0 * imag.std_error;
}

BochnerEstimate phi_bochner(const HypergroupParams& p, const ConePoint& s, const ConePoint& r,
                            std::size_t n_samples, Rng& rng) {
  p.require_hypergroup();
  if (s.q() != p.q() || r.q() != p.q()) throw DomainError("phi_bochner: shape mismatch");
  // (r v | s) = Re tr(v^* r s)
  const MatrixStorage rs = r.data() * s.data();
  RunningMean re, im;
  for (std::size_t k = 0; k < n_samples; ++k) {
    const BallPoint v = sample_ball(p, rng);
    const double phase = (v.matrix().data().adjoint() * rs).trace().real();
    re.add(std::cos(phase));
    im.add(-std::sin(phase));
  }
  return {re.estimate(), im.estimate()};
}

ConePoint conv_point(const ConePoint& r, const ConePoint& s, const BallPoint& v) {
  const auto& R = r.data();
  const auto& S = s.data();
  const auto& V = v.matrix().data();
  const MatrixStorage svr = S * V * R;
  const MatrixStorage inner = R * R + S * S + svr + svr.adjoint();
  ConePoint z = psd_sqrt(hermitian_from_storage(r.d(), inner));
  audit(z.norm() - r.norm() - s.norm());
  return z;
}

ConePoint conv_sample(const HypergroupParams& p, const ConePoint& r, const ConePoint& s, Rng& rng) {
  if (r.q() != p.q() || s.q() != p.q() || r.d() != p.d() || s.d() != p.d()) {
    throw DomainError("conv_sample: shape mismatch");
  }
  return conv_point(r, s, sample_ball(p, rng));
}

Estimate conv_expect(const HypergroupParams& p, const std::function<double(const ConePoint&)>& f,
                     const ConePoint& r, const ConePoint& s, std::size_t n_samples, Rng& rng) {
  RunningMean acc;
  for (std::size_t k = 0; k < n_samples; ++k) acc.add(f(conv_sample(p, r, s, rng)));
  return acc.estimate();
}

bool support_window_check(const HypergroupParams& p, const ConePoint& r, double c, const ConePoint& z,
                          double tol) {
  if (!(c > 0.0 && c <= 1.0)) throw DomainError("support_window_check: c must lie in (0, 1]");
  if (r.q() != p.q() || z.q() != p.q()) throw DomainError("support_window_check: shape mismatch");
  return loewner_leq((1.0 - c) * r.hermitian(), z, tol) && loewner_leq(z, (1.0 + c) * r.hermitian(), tol);
}

SupportAudit support_audit() {
  std::lock_guard lock(g_worst_mutex);
  return {g_samples.load(), g_violations.load(), g_worst_excess};
}

void reset_support_audit() {
  std::lock_guard lock(g_worst_mutex);
  g_samples = 0;
  g_violations = 0;
  g_worst_excess = 0.0;
}

}  // namespace conebessel
