#include "conebessel/jack_series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace conebessel {

namespace {

// Jack polynomials in the J normalisation are evaluated with the
// horizontal-strip recursion (Koev & Edelman):
//
//   J_k(x_1..x_m) = sum_{k/u horizontal strip} J_u(x_1..x_{m-1}) x_m^{|k|-|u|} beta_{k,u}
//
// beta_{k,u} = prod_{(i,j) in k} B^k(i,j) / prod_{(i,j) in u} B^u(i,j) where
// B^v(i,j) is the upper hook length of v when columns j of k and u have the
// same length and the lower hook length otherwise. The coefficients depend
// only on (q, alpha) and are built once per weight layer.

struct Strip {
  int sub_weight;
  int sub_index;
  int sub_length;
  double beta;
};

struct Node {
  std::vector<int> parts;
  int length = 0;
  /// 1 / j_kappa with j_kappa = prod upper * lower hook lengths.
  double inv_j = 1.0;
  std::size_t strip_begin = 0;
  std::size_t strip_end = 0;
};

struct Layer {
  int weight = 0;
  std::vector<Node> nodes;
  std::vector<Strip> strips;
  std::map<std::vector<int>, int> index;
};

int part(const std::vector<int>& v, int i) {
  return i < static_cast<int>(v.size()) ? v[static_cast<std::size_t>(i)] : 0;
}

int column(const std::vector<int>& v, int j) {
  int count = 0;
  for (int p : v) {
    if (p > j) ++count;
  }
  return count;
}

// 0-based cell (i, j).
double upper_hook(const std::vector<int>& v, int i, int j, double alpha) {
  return column(v, j) - (i + 1) + alpha * (part(v, i) - (j + 1) + 1);
}

double lower_hook(const std::vector<int>& v, int i, int j, double alpha) {
  return column(v, j) - (i + 1) + 1 + alpha * (part(v, i) - (j + 1));
}

double strip_beta(const std::vector<int>& kappa, const std::vector<int>& sub, double alpha) {
  double num = 1.0;
  for (int i = 0; i < static_cast<int>(kappa.size()); ++i) {
    for (int j = 0; j < kappa[static_cast<std::size_t>(i)]; ++j) {
      const bool same = column(kappa, j) == column(sub, j);
      num *= same ? upper_hook(kappa, i, j, alpha) : lower_hook(kappa, i, j, alpha);
    }
  }
  double den = 1.0;
  for (int i = 0; i < static_cast<int>(sub.size()); ++i) {
    for (int j = 0; j < sub[static_cast<std::size_t>(i)]; ++j) {
      const bool same = column(kappa, j) == column(sub, j);
      den *= same ? upper_hook(sub, i, j, alpha) : lower_hook(sub, i, j, alpha);
    }
  }
  return num / den;
}

class JackTable {
 public:
  JackTable(int q, double alpha) : q_(q), alpha_(alpha) {}

  /// Pointers to layers 0..k; layers are immutable once built.
  void snapshot(int k, std::vector<const Layer*>& out) {
    std::lock_guard lock(mutex_);
    while (static_cast<int>(layers_.size()) <= k) build_layer(static_cast<int>(layers_.size()));
    out.resize(static_cast<std::size_t>(k) + 1);
    for (int i = 0; i <= k; ++i) out[static_cast<std::size_t>(i)] = layers_[static_cast<std::size_t>(i)].get();
  }

 private:
  void build_layer(int k) {
    auto layer = std::make_unique<Layer>();
    layer->weight = k;
    for (const Partition& lam : partitions(k, q_)) {
      Node node;
      node.parts = lam.parts();
      node.length = lam.length();
      double j_kappa = 1.0;
      for (int i = 0; i < node.length; ++i) {
        for (int j = 0; j < node.parts[static_cast<std::size_t>(i)]; ++j) {
          j_kappa *= upper_hook(node.parts, i, j, alpha_) * lower_hook(node.parts, i, j, alpha_);
        }
      }
      node.inv_j = 1.0 / j_kappa;
      node.strip_begin = layer->strips.size();
      std::vector<int> sub(node.parts.size(), 0);
      add_strips(node.parts, sub, 0, *layer);
      node.strip_end = layer->strips.size();
      layer->index.emplace(node.parts, static_cast<int>(layer->nodes.size()));
      layer->nodes.push_back(std::move(node));
    }
    layers_.push_back(std::move(layer));
  }

  // Enumerates u with kappa_{i+1} <= u_i <= kappa_i.
  void add_strips(const std::vector<int>& kappa, std::vector<int>& sub, int i, Layer& layer) {
    if (i == static_cast<int>(kappa.size())) {
      std::vector<int> trimmed = sub;
      while (!trimmed.empty() && trimmed.back() == 0) trimmed.pop_back();
      int weight = 0;
      for (int p : trimmed) weight += p;
      int total = 0;
      for (int p : kappa) total += p;
      // u = kappa is the trivial strip; evaluate_J handles it inline.
      if (weight == total) return;
      const Layer& target = *layers_[static_cast<std::size_t>(weight)];
      const int index = target.index.at(trimmed);
      layer.strips.push_back({weight, index, static_cast<int>(trimmed.size()),
                              strip_beta(kappa, trimmed, alpha_)});
      return;
    }
    const int lo = part(kappa, i + 1);
    const int hi = kappa[static_cast<std::size_t>(i)];
    for (int v = lo; v <= hi; ++v) {
      sub[static_cast<std::size_t>(i)] = v;
      add_strips(kappa, sub, i + 1, layer);
    }
  }

  int q_;
  double alpha_;
  std::vector<std::unique_ptr<Layer>> layers_;
  std::mutex mutex_;
};

JackTable& table_for(int q, double alpha) {
  static std::mutex registry_mutex;
  static std::map<std::pair<int, double>, std::unique_ptr<JackTable>> registry;
  std::lock_guard lock(registry_mutex);
  auto& slot = registry[{q, alpha}];
  if (!slot) slot = std::make_unique<JackTable>(q, alpha);
  return *slot;
}

// J_kappa(xi) for every kappa of weight <= layers.size() - 1.
void evaluate_J(const std::vector<const Layer*>& layers, std::span<const double> xi,
                std::vector<std::vector<double>>& result) {
  const int top = static_cast<int>(layers.size()) - 1;
  const int q = static_cast<int>(xi.size());
  thread_local std::vector<std::vector<double>> prev;
  thread_local std::vector<double> powers;
  prev.resize(layers.size());
  result.resize(layers.size());
  for (std::size_t k = 0; k < layers.size(); ++k) {
    prev[k].assign(layers[k]->nodes.size(), 0.0);
    result[k].assign(layers[k]->nodes.size(), 0.0);
  }
  prev[0][0] = 1.0;
  powers.resize(layers.size());

  for (int m = 1; m <= q; ++m) {
    const double x = xi[static_cast<std::size_t>(m - 1)];
    powers[0] = 1.0;
    for (int e = 1; e <= top; ++e) powers[static_cast<std::size_t>(e)] = powers[static_cast<std::size_t>(e - 1)] * x;
    for (int k = 0; k <= top; ++k) {
      const Layer& layer = *layers[static_cast<std::size_t>(k)];
      auto& out = result[static_cast<std::size_t>(k)];
      for (std::size_t idx = 0; idx < layer.nodes.size(); ++idx) {
        const Node& node = layer.nodes[idx];
        if (node.length > m) {
          out[idx] = 0.0;
          continue;
        }
        // The trivial strip (u = kappa, beta = 1) contributes J_kappa of
        // m-1 variables, nonzero only when kappa has fewer than m parts.
        double sum = node.length <= m - 1 ? prev[static_cast<std::size_t>(k)][idx] : 0.0;
        for (std::size_t s = node.strip_begin; s < node.strip_end; ++s) {
          const Strip& strip = layer.strips[s];
          if (strip.sub_length > m - 1) continue;
          sum += prev[static_cast<std::size_t>(strip.sub_weight)][static_cast<std::size_t>(strip.sub_index)] *
                 powers[static_cast<std::size_t>(k - strip.sub_weight)] * strip.beta;
        }
        out[idx] = sum;
      }
    }
    std::swap(prev, result);
  }
  std::swap(prev, result);
}

double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

}  // namespace

std::vector<double> jack_C_layer(int k, double alpha, std::span<const double> xi) {
  if (xi.empty()) throw DomainError("jack_C: need at least one variable");
  if (!(alpha > 0.0)) throw DomainError("jack_C: alpha must be positive");
  if (k < 0) throw DomainError("jack_C: weight must be nonnegative");
  std::vector<const Layer*> layers;
  table_for(static_cast<int>(xi.size()), alpha).snapshot(k, layers);
  std::vector<std::vector<double>> values;
  evaluate_J(layers, xi, values);
  const double scale = std::exp(k * std::log(alpha) + log_factorial(k));
  const Layer& layer = *layers.back();
  std::vector<double> out(layer.nodes.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = scale * layer.nodes[i].inv_j * values.back()[i];
  }
  return out;
}

double jack_C(const Partition& lam, double alpha, std::span<const double> xi) {
  if (lam.length() > static_cast<int>(xi.size())) {
    throw DomainError("jack_C: partition " + lam.to_string() + " has more parts than variables");
  }
  const auto layer = jack_C_layer(lam.weight(), alpha, xi);
  const auto all = partitions(lam.weight(), static_cast<int>(xi.size()));
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i] == lam) return layer[i];
  }
  throw DomainError("jack_C: partition not found");  // unreachable
}

double zonal_Z(const HypergroupParams& p, const Partition& lam, const HermitianMatrix& x) {
  if (x.q() != p.q() || x.d() != p.d()) throw DomainError("zonal_Z: matrix shape does not match params");
  const HermitianEigen e = eig_herm(x);
  return jack_C(lam, p.alpha(), std::span<const double>(e.values.data(), static_cast<std::size_t>(e.values.size())));
}

BesselEval bessel_J_spectrum(int d, double mu, std::span<const double> xi, double target_tol) {
  const int q = static_cast<int>(xi.size());
  if (q < 1) throw DomainError("bessel_J: empty spectrum");
  if (d != 1 && d != 2) throw DomainError("bessel_J: d must be 1 or 2");
  if (!(target_tol > 0.0)) throw DomainError("bessel_J: target_tol must be positive");
  const double smallest_shift = mu - 0.5 * d * (q - 1);
  if (!(smallest_shift > 0.0)) {
    throw DomainError("bessel_J: need mu > (d/2)(q-1) for a positive Pochhammer system");
  }
  const double alpha = 2.0 / d;
  double s = 0.0;
  for (double x : xi) s += std::abs(x);

  JackTable& table = table_for(q, alpha);
  std::vector<const Layer*> layers;
  thread_local std::vector<std::vector<double>> poch;

  // Layer k of the series is bounded by T_k = s^k / (k! m_k), m_k = min_|l|=k (mu)_l.
  // Removing the last box of the lowest longest row of l (|l| = k+1, length
  // >= (k+1)/q) shows m_{k+1} >= m_k f_k with f_k = a_q + max(0, ceil((k+1)/q) - 1),
  // so T_{k+1} <= T_k r_k with r_k = s / ((k+1) f_k), decreasing in k.
  auto growth = [&](int k) {
    return smallest_shift + std::max(0, (k + 1 + q - 1) / q - 1);
  };
  int degree = 0;
  double bound = 0.0;
  poch.clear();
  for (int k = 0;; ++k) {
    if (k > kSeriesCap) {
      throw SeriesCapError("bessel_J: argument too large for the series (|spectrum|_1 = " +
                           std::to_string(s) + "); use the Bochner evaluator");
    }
    table.snapshot(k, layers);
    const Layer& layer = *layers.back();
    std::vector<double> layer_poch(layer.nodes.size());
    double min_poch = HUGE_VAL;
    for (std::size_t i = 0; i < layer.nodes.size(); ++i) {
      double value = 1.0;
      const auto& parts = layer.nodes[i].parts;
      for (std::size_t j = 0; j < parts.size(); ++j) {
        const double a = mu - 0.5 * d * static_cast<double>(j);
        for (int t = 0; t < parts[j]; ++t) value *= a + t;
      }
      layer_poch[i] = value;
      min_poch = std::min(min_poch, value);
    }
    poch.push_back(std::move(layer_poch));
    if (s == 0.0) {
      degree = 0;
      bound = 0.0;
      break;
    }
    const double log_tk = k * std::log(s) - log_factorial(k) - std::log(min_poch);
    const double ratio_next = s / ((k + 1) * growth(k));
    const double ratio_tail = s / ((k + 2) * growth(k + 1));
    if (ratio_tail < 1.0) {
      bound = std::exp(log_tk) * ratio_next / (1.0 - ratio_tail);
      if (bound <= target_tol) {
        degree = k;
        break;
      }
    }
  }

  std::vector<std::vector<double>> values;
  if (degree + 1 != static_cast<int>(layers.size())) layers.resize(static_cast<std::size_t>(degree) + 1);
  evaluate_J(layers, xi, values);

  double total = 0.0;
  double magnitude = 0.0;
  double alpha_power = 1.0;
  for (int k = 0; k <= degree; ++k) {
    const Layer& layer = *layers[static_cast<std::size_t>(k)];
    double layer_sum = 0.0;
    double layer_abs = 0.0;
    for (std::size_t i = 0; i < layer.nodes.size(); ++i) {
      const double term = layer.nodes[i].inv_j * values[static_cast<std::size_t>(k)][i] /
                          poch[static_cast<std::size_t>(k)][i];
      layer_sum += term;
      layer_abs += std::abs(term);
    }
    total += (k % 2 == 0 ? 1.0 : -1.0) * alpha_power * layer_sum;
    magnitude += alpha_power * layer_abs;
    alpha_power *= alpha;
  }
  return {total, bound, degree, magnitude * std::numeric_limits<double>::epsilon()};
}

BesselEval bessel_J(const HypergroupParams& p, double mu, const HermitianMatrix& x,
                    double target_tol) {
  if (x.q() != p.q() || x.d() != p.d()) throw DomainError("bessel_J: matrix shape does not match params");
  const HermitianEigen e = eig_herm(x);
  return bessel_J_spectrum(p.d(), mu,
                           std::span<const double>(e.values.data(), static_cast<std::size_t>(e.values.size())),
                           target_tol);
}

double character_phi_hermitian(const HypergroupParams& p, const HermitianMatrix& s,
                               const ConePoint& r, double target_tol) {
  // s r^2 s / 4 = (s r)(s r)^* / 4 has the same spectrum as r s^2 r / 4.
  const MatrixStorage sr = s.data() * r.data();
  const HermitianMatrix arg = hermitian_from_storage(p.d(), 0.25 * sr * sr.adjoint());
  return bessel_J(p, p.mu(), arg, target_tol).value;
}

double character_phi(const HypergroupParams& p, const ConePoint& s, const ConePoint& r,
                     double target_tol) {
  return character_phi_hermitian(p, s.hermitian(), r, target_tol);
}

}  // namespace conebessel
