#include "conebessel/randwalk_limits.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "conebessel/jack_series.hpp"
#include "conebessel/version.hpp"

namespace conebessel {

namespace {

template <class... F>
struct Overloaded : F... {
  using F::operator()...;
};

void check_law(const HypergroupParams& p, const StepLaw& law) {
  std::visit(Overloaded{
                 [&](const PointMassStep& s) {
                   if (s.r0.q() != p.q() || s.r0.d() != p.d()) throw DomainError("step law: point mass shape mismatch");
                 },
                 [&](const WishartStep& s) {
                   if (!(s.spec.params == p)) throw DomainError("step law: Wishart parameters differ from the walk's");
                 },
                 [&](const EmpiricalStep& s) {
                   if (s.measure.q != p.q() || s.measure.d != p.d()) {
                     throw DomainError("step law: empirical measure shape mismatch");
                   }
                 },
             },
             law);
}

void check_walk(const HypergroupParams& p, const StepLaw& law, int n, int replicas) {
  p.require_hypergroup();
  if (n < 1) throw DomainError("walk: need at least one step");
  if (replicas < 1) throw DomainError("walk: need at least one replica");
  check_law(p, law);
}

/// Checkpoints 1, 2, 4, ... up to n_max, with n_max appended.
std::vector<int> geometric_schedule(int n_max, bool with_zero) {
  std::vector<int> out;
  if (with_zero) out.push_back(0);
  for (int n = 1; n < n_max; n *= 2) out.push_back(n);
  out.push_back(n_max);
  return out;
}

/// Real coordinates of the upper triangle (re, and im off the diagonal when d = 2).
std::vector<double> upper_coordinates(const HermitianMatrix& h) {
  std::vector<double> out;
  for (int i = 0; i < h.q(); ++i) {
    for (int j = i; j < h.q(); ++j) {
      out.push_back(h(i, j).real());
      if (h.d() == 2 && i != j) out.push_back(h(i, j).imag());
    }
  }
  return out;
}

nlohmann::json estimates_json(const std::vector<Estimate>& e) {
  nlohmann::json values = nlohmann::json::array();
  for (const auto& x : e) values.push_back(x.value);
  return values;
}

nlohmann::json stderrs_json(const std::vector<Estimate>& e) {
  nlohmann::json values = nlohmann::json::array();
  for (const auto& x : e) values.push_back(x.std_error);
  return values;
}

nlohmann::json header(const char* experiment, const HypergroupParams& p, const std::string& law,
                      std::uint64_t seed, int replicas) {
  return {{"experiment", experiment}, {"version", kVersion}, {"params", to_json(p)},
          {"step_law", law},          {"seed", seed},        {"replicas", replicas}};
}

}  // namespace

EmpiricalStep::EmpiricalStep(EmpiricalMeasure m) : measure(std::move(m)) {
  if (measure.points.empty()) throw DomainError("empirical step law: no points");
  if (measure.weights.size() != measure.points.size()) throw DomainError("empirical step law: weight count mismatch");
  double total = 0.0;
  for (double w : measure.weights) {
    if (!(w >= 0.0)) throw DomainError("empirical step law: negative weight");
    total += w;
    cumulative.push_back(total);
  }
  if (!(total > 0.0)) throw DomainError("empirical step law: weights sum to zero");
  for (double& c : cumulative) c /= total;
}

ConePoint sample_step(const StepLaw& law, Rng& rng) {
  return std::visit(Overloaded{
                        [](const PointMassStep& s) { return s.r0; },
                        [&](const WishartStep& s) { return sample_scaled(s.spec, rng); },
                        [&](const EmpiricalStep& s) {
                          const double u = rng.uniform();
                          auto it = std::upper_bound(s.cumulative.begin(), s.cumulative.end(), u);
                          if (it == s.cumulative.end()) --it;
                          return s.measure.points[static_cast<std::size_t>(it - s.cumulative.begin())];
                        },
                    },
                    law);
}

std::string step_law_name(const StepLaw& law) {
  return std::visit(Overloaded{
                        [](const PointMassStep&) { return std::string("point_mass"); },
                        [](const WishartStep&) { return std::string("wishart"); },
                        [](const EmpiricalStep&) { return std::string("empirical"); },
                    },
                    law);
}

HermitianMatrix step_second_moment(const StepLaw& law) {
  return std::visit(Overloaded{
                        [](const PointMassStep& s) { return s.r0.squared().hermitian(); },
                        [](const WishartStep& s) {
                          // E[T T^*] = 2 mu I for the Bartlett factor
                          return (2.0 * s.spec.params.mu() * s.spec.t) * s.spec.scale_sq.hermitian();
                        },
                        [](const EmpiricalStep& s) {
                          HermitianMatrix acc(s.measure.q, s.measure.d);
                          double wsum = 0.0;
                          for (std::size_t k = 0; k < s.measure.points.size(); ++k) {
                            acc = acc + s.measure.weights[k] * s.measure.points[k].squared().hermitian();
                            wsum += s.measure.weights[k];
                          }
                          return (1.0 / wsum) * acc;
                        },
                    },
                    law);
}

double step_fourier(const HypergroupParams& p, const StepLaw& law, const ConePoint& s) {
  check_law(p, law);
  return std::visit(Overloaded{
                        [&](const PointMassStep& st) { return character_phi(p, s, st.r0); },
                        [&](const WishartStep& st) {
                          return fourier_closed(p, ConePoint(st.spec.t * st.spec.scale_sq.hermitian()), s);
                        },
                        [&](const EmpiricalStep& st) {
                          double acc = 0.0;
                          double wsum = 0.0;
                          for (std::size_t k = 0; k < st.measure.points.size(); ++k) {
                            acc += st.measure.weights[k] * character_phi(p, s, st.measure.points[k]);
                            wsum += st.measure.weights[k];
                          }
                          return acc / wsum;
                        },
                    },
                    law);
}

Path walk_path(const HypergroupParams& p, const StepLaw& law, int n_steps, Rng& rng) {
  Path path;
  path.reserve(static_cast<std::size_t>(n_steps) + 1);
  path.push_back(ConePoint::zero(p.q(), p.d()));
  for (int k = 0; k < n_steps; ++k) {
    const ConePoint y = sample_step(law, rng);
    path.push_back(conv_sample(p, path.back(), y, rng));
  }
  return path;
}

std::vector<Path> walk_simulate(const WalkConfig& cfg, const ReplicaRunner& runner) {
  check_walk(cfg.params, cfg.step_law, cfg.n_steps, cfg.n_replicas);
  std::vector<Path> paths(static_cast<std::size_t>(cfg.n_replicas));
  runner.run(paths.size(), cfg.seed, [&](std::size_t i, Rng& rng) {
    paths[i] = walk_path(cfg.params, cfg.step_law, cfg.n_steps, rng);
  });
  return paths;
}

double moment_m2(const HypergroupParams& p, const HermitianMatrix& s1, const HermitianMatrix& s2,
                 const ConePoint& r) {
  if (s1.q() != p.q() || s2.q() != p.q() || r.q() != p.q()) throw DomainError("moment_m2: shape mismatch");
  return (s1.data() * r.squared().data() * s2.data()).trace().real() / (2.0 * p.mu());
}

double default_moment_step(int order, const ConePoint& r) {
  return (order == 4 ? 1e-1 : 1e-3) / (1.0 + r.norm());
}

MomentEstimate moment_numeric(const HypergroupParams& p, const MomentSpec& spec, const ConePoint& r,
                              double h) {
  const int k = spec.order;
  if (k != 2 && k != 4) throw DomainError("moment_numeric: order must be 2 or 4");
  if (static_cast<int>(spec.directions.size()) != k) {
    throw DomainError("moment_numeric: need one direction per derivative");
  }
  if (!(h > 0.0)) throw DomainError("moment_numeric: step must be positive");
  for (const auto& s : spec.directions) {
    if (s.q() != p.q() || s.d() != p.d()) throw DomainError("moment_numeric: direction shape mismatch");
  }
  if (r.q() != p.q() || r.d() != p.d()) throw DomainError("moment_numeric: shape mismatch");
  // Mixed central difference: (2h)^{-k} sum over sign vectors of (prod signs) phi_{h sum eps_l s_l}(r).
  auto difference = [&](double step) {
    double acc = 0.0;
    for (int mask = 0; mask < (1 << k); ++mask) {
      HermitianMatrix s(p.q(), p.d());
      int sign = 1;
      for (int l = 0; l < k; ++l) {
        const int eps = (mask >> l) & 1 ? -1 : 1;
        sign *= eps;
        s = s + (eps * step) * spec.directions[static_cast<std::size_t>(l)];
      }
      acc += sign * character_phi_hermitian(p, s, r, 1e-15);
    }
    return acc / std::pow(2.0 * step, k);
  };
  const double coarse = difference(h);
  const double fine = difference(0.5 * h);
  const double richardson = (4.0 * fine - coarse) / 3.0;
  // i^k: -1 for k = 2, +1 for k = 4
  const double phase = k == 2 ? -1.0 : 1.0;
  return {phase * richardson, std::abs(richardson - fine)};
}

CltReport clt_experiment(const HypergroupParams& p, const StepLaw& law, int n, int replicas,
                         const std::vector<ConePoint>& s_grid, std::uint64_t seed, const ReplicaRunner& runner) {
  check_walk(p, law, n, replicas);
  const auto r = static_cast<std::size_t>(replicas);
  std::vector<ConePoint> rescaled(r, ConePoint::zero(p.q(), p.d()));
  std::vector<HermitianMatrix> step_sq(r, HermitianMatrix(p.q(), p.d()));
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  runner.run(r, seed, [&](std::size_t i, Rng& rng) {
    ConePoint s = ConePoint::zero(p.q(), p.d());
    HermitianMatrix acc(p.q(), p.d());
    for (int k = 0; k < n; ++k) {
      const ConePoint y = sample_step(law, rng);
      acc = acc + y.squared().hermitian();
      s = conv_sample(p, s, y, rng);
    }
    // T_{n^{-1/2} I}(S_n) = n^{-1/2} S_n
    rescaled[i] = ConePoint(scale * s.hermitian());
    step_sq[i] = acc;
  });

  CltReport out;
  out.params = p;
  out.step_law = step_law_name(law);
  out.n = n;
  out.replicas = replicas;
  out.seed = seed;
  HermitianMatrix sum(p.q(), p.d());
  for (const auto& a : step_sq) sum = sum + a;
  out.sigma2_plugin = (1.0 / (2.0 * p.mu() * static_cast<double>(n) * replicas)) * sum;
  out.sigma2_closed = (1.0 / (2.0 * p.mu())) * step_second_moment(law);
  out.grid = s_grid;
  const EmpiricalMeasure m = EmpiricalMeasure::uniform(p, std::move(rescaled), seed);
  for (const ConePoint& s : s_grid) {
    const Estimate e = fourier_empirical(p, m, s);
    const double target =
        std::exp(-0.5 * (s.data() * out.sigma2_plugin.data() * s.data()).trace().real());
    out.estimates.push_back(e);
    out.targets.push_back(target);
    out.deviations.push_back(std::abs(e.value - target));
    out.sup_deviation = std::max(out.sup_deviation, out.deviations.back());
  }
  return out;
}

SllnReport slln_experiment(const HypergroupParams& p, const StepLaw& law, Normalisation rule, double lambda,
                           int n_max, int replicas, std::uint64_t seed, const ReplicaRunner& runner) {
  check_walk(p, law, n_max, replicas);
  if (rule == Normalisation::power && !(lambda > 0.0 && lambda < 2.0)) {
    throw DomainError("slln: lambda must lie in (0, 2)");
  }
  SllnReport out;
  out.params = p;
  out.step_law = step_law_name(law);
  out.rule = rule;
  out.lambda = rule == Normalisation::linear ? 1.0 : lambda;
  out.replicas = replicas;
  out.seed = seed;
  out.checkpoints = geometric_schedule(n_max, false);
  auto a_n = [&](int n) {
    return rule == Normalisation::linear ? static_cast<double>(n) : std::pow(static_cast<double>(n), 1.0 / lambda);
  };
  const std::size_t c_count = out.checkpoints.size();
  out.ratios.assign(c_count, std::vector<double>(static_cast<std::size_t>(replicas)));
  runner.run(static_cast<std::size_t>(replicas), seed, [&](std::size_t i, Rng& rng) {
    ConePoint s = ConePoint::zero(p.q(), p.d());
    std::size_t c = 0;
    for (int k = 1; k <= n_max; ++k) {
      s = conv_sample(p, s, sample_step(law, rng), rng);
      if (k == out.checkpoints[c]) out.ratios[c++][i] = s.norm() / a_n(k);
    }
  });
  for (const auto& row : out.ratios) {
    out.max_ratio.push_back(*std::max_element(row.begin(), row.end()));
    out.median_ratio.push_back(median(row));
  }
  int below = 0;
  for (int i = 0; i < replicas; ++i) below += out.ratios.back()[static_cast<std::size_t>(i)] < out.ratios.front()[static_cast<std::size_t>(i)];
  out.fraction_last_below_first = static_cast<double>(below) / replicas;
  out.median_decreasing = true;
  for (std::size_t c = 1; c < c_count; ++c) out.median_decreasing &= out.median_ratio[c] < out.median_ratio[c - 1];
  // E||Y||^2 = E tr Y^2; sum_n a_n^{-2} = zeta(2 / lambda)
  const double second = step_second_moment(law).trace();
  out.summability = second * std::riemann_zeta(2.0 / out.lambda);
  return out;
}

MartingaleReport martingale_check(const HypergroupParams& p, const StepLaw& law, const ConePoint& s, int n_max,
                                  int replicas, std::uint64_t seed, const ReplicaRunner& runner) {
  check_walk(p, law, n_max, replicas);
  if (s.q() != p.q() || s.d() != p.d()) throw DomainError("martingale_check: s shape mismatch");
  MartingaleReport out;
  out.params = p;
  out.step_law = step_law_name(law);
  out.s = s;
  out.replicas = replicas;
  out.seed = seed;
  out.step_transform = step_fourier(p, law, s);
  if (!(std::pow(std::abs(out.step_transform), n_max) >= 0.01)) {
    throw DomainError("martingale_check: transform of the step law at s is too close to 0 for " +
                      std::to_string(n_max) + " steps; choose a smaller s");
  }
  const std::vector<int> schedule = geometric_schedule(n_max, true);
  const std::size_t c_count = schedule.size();
  const auto r = static_cast<std::size_t>(replicas);
  std::vector<std::vector<double>> phi(c_count, std::vector<double>(r));
  std::vector<std::vector<ConePoint>> points(c_count, std::vector<ConePoint>(r, ConePoint::zero(p.q(), p.d())));
  runner.run(r, seed, [&](std::size_t i, Rng& rng) {
    ConePoint x = ConePoint::zero(p.q(), p.d());
    std::size_t c = 0;
    for (int k = 0; k <= n_max; ++k) {
      if (k > 0) x = conv_sample(p, x, sample_step(law, rng), rng);
      if (k == schedule[c]) {
        phi[c][i] = character_phi(p, s, x, 1e-10);
        points[c][i] = x;
        ++c;
      }
    }
  });
  const HermitianMatrix second = step_second_moment(law);
  for (std::size_t c = 0; c < c_count; ++c) {
    MartingaleRow row;
    row.n = schedule[c];
    RunningMean acc;
    for (double v : phi[c]) acc.add(v);
    row.phi = acc.estimate();
    row.target = std::pow(out.step_transform, row.n);
    row.z = one_sample_z(row.phi, row.target);
    const std::vector<double> expected = upper_coordinates(row.n * second);
    std::vector<RunningMean> coords(expected.size());
    for (const ConePoint& x : points[c]) {
      const std::vector<double> v = upper_coordinates(x.squared().hermitian());
      for (std::size_t j = 0; j < v.size(); ++j) coords[j].add(v[j] - expected[j]);
    }
    for (const auto& m : coords) row.second_moment_z = std::max(row.second_moment_z, one_sample_z(m.estimate(), 0.0));
    out.max_z = std::max(out.max_z, row.z);
    out.max_second_moment_z = std::max(out.max_second_moment_z, row.second_moment_z);
    out.rows.push_back(row);
  }
  return out;
}

nlohmann::json to_json(const HypergroupParams& p) {
  return {{"q", p.q()}, {"d", p.d()}, {"mu", p.mu()}, {"rho", p.rho()}};
}

nlohmann::json to_json(const HermitianMatrix& m) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (int i = 0; i < m.q(); ++i) {
    nlohmann::json rr = nlohmann::json::array();
    nlohmann::json ri = nlohmann::json::array();
    for (int j = 0; j < m.q(); ++j) {
      rr.push_back(m(i, j).real());
      ri.push_back(m(i, j).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  if (m.d() == 1) return re;
  return {{"re", re}, {"im", im}};
}

nlohmann::json to_json(const CltReport& r) {
  nlohmann::json j = header("clt", r.params, r.step_law, r.seed, r.replicas);
  j["n"] = r.n;
  j["sigma2_plugin"] = to_json(r.sigma2_plugin);
  j["sigma2_closed"] = r.sigma2_closed ? to_json(*r.sigma2_closed) : nlohmann::json(nullptr);
  j["grid"] = nlohmann::json::array();
  for (const auto& s : r.grid) j["grid"].push_back(to_json(s.hermitian()));
  j["estimates"] = estimates_json(r.estimates);
  j["stderrs"] = stderrs_json(r.estimates);
  j["targets"] = r.targets;
  j["deviations"] = r.deviations;
  j["sup_deviation"] = r.sup_deviation;
  j["verdicts"] = {{"sup_deviation_le_0.02", r.sup_deviation <= 0.02}};
  return j;
}

nlohmann::json to_json(const SllnReport& r) {
  nlohmann::json j = header("slln", r.params, r.step_law, r.seed, r.replicas);
  j["rule"] = r.rule == Normalisation::linear ? "n" : "n^(1/lambda)";
  j["lambda"] = r.lambda;
  j["grid"] = r.checkpoints;
  j["estimates"] = r.median_ratio;
  j["max_ratio"] = r.max_ratio;
  j["summability"] = r.summability;
  j["fraction_last_below_first"] = r.fraction_last_below_first;
  j["verdicts"] = {{"last_below_first_ge_0.95", r.fraction_last_below_first >= 0.95},
                   {"median_decreasing", r.median_decreasing}};
  return j;
}

nlohmann::json to_json(const MartingaleReport& r) {
  nlohmann::json j = header("martingale", r.params, r.step_law, r.seed, r.replicas);
  j["s"] = to_json(r.s.hermitian());
  j["step_transform"] = r.step_transform;
  nlohmann::json grid = nlohmann::json::array();
  nlohmann::json est = nlohmann::json::array();
  nlohmann::json se = nlohmann::json::array();
  nlohmann::json target = nlohmann::json::array();
  nlohmann::json z2 = nlohmann::json::array();
  for (const auto& row : r.rows) {
    grid.push_back(row.n);
    est.push_back(row.phi.value);
    se.push_back(row.phi.std_error);
    target.push_back(row.target);
    z2.push_back(row.second_moment_z);
  }
  j["grid"] = grid;
  j["estimates"] = est;
  j["stderrs"] = se;
  j["targets"] = target;
  j["second_moment_z"] = z2;
  j["verdicts"] = {{"character_within_3se", r.max_z <= 3.0}, {"second_moment_within_3se", r.max_second_moment_z <= 3.0}};
  return j;
}

void write_paths_csv(std::ostream& out, const HypergroupParams& p, std::uint64_t seed,
                     const std::vector<Path>& paths) {
  out << "# conebessel " << kVersion << " q=" << p.q() << " d=" << p.d() << " mu=" << std::setprecision(17)
      << p.mu() << " seed=" << seed << "\n";
  out << "replica,step";
  for (int i = 0; i < p.q(); ++i) {
    for (int j = 0; j < p.q(); ++j) {
      out << ",m" << i << j;
      if (p.d() == 2) out << "_re,m" << i << j << "_im";
    }
  }
  out << "\n";
  for (std::size_t r = 0; r < paths.size(); ++r) {
    for (std::size_t k = 0; k < paths[r].size(); ++k) {
      out << r << "," << k;
      const auto& x = paths[r][k];
      for (int i = 0; i < p.q(); ++i) {
        for (int j = 0; j < p.q(); ++j) {
          out << "," << x(i, j).real();
          if (p.d() == 2) out << "," << x(i, j).imag();
        }
      }
      out << "\n";
    }
  }
}

}  // namespace conebessel
