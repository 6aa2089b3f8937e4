#pragma once

// Random walks S_n = S_{n-1} * Y_n on the cone, moment functions and the
// limit-theorem experiments.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "conebessel/ball_measure.hpp"
#include "conebessel/cone_core.hpp"
#include "conebessel/random.hpp"
#include "conebessel/statistics.hpp"
#include "conebessel/wishart.hpp"
#include "json.hpp"

namespace conebessel {

struct PointMassStep {
  ConePoint r0;
};
struct WishartStep {
  WishartSpec spec;
};
/// Draws are resampled from the measure according to its weights.
struct EmpiricalStep {
  explicit EmpiricalStep(EmpiricalMeasure m);
  EmpiricalMeasure measure;
  std::vector<double> cumulative;
};
using StepLaw = std::variant<PointMassStep, WishartStep, EmpiricalStep>;

ConePoint sample_step(const StepLaw& law, Rng& rng);
std::string step_law_name(const StepLaw& law);
/// E[Y^2] when it is known in closed form (all built-in laws).
HermitianMatrix step_second_moment(const StepLaw& law);
/// hat(law)(s); exact for point masses, Wishart laws and finite samples.
double step_fourier(const HypergroupParams& p, const StepLaw& law, const ConePoint& s);

struct WalkConfig {
  HypergroupParams params{1, 1, 1.0};
  StepLaw step_law;
  int n_steps = 1;
  int n_replicas = 1;
  std::uint64_t seed = 0;
};

using Path = std::vector<ConePoint>;

/// S_0 = 0, ..., S_n for one replica.
Path walk_path(const HypergroupParams& p, const StepLaw& law, int n_steps, Rng& rng);

/// Replica i runs on stream (cfg.seed, i).
std::vector<Path> walk_simulate(const WalkConfig& cfg, const ReplicaRunner& runner = ReplicaRunner{});

/// Re tr(s1 r^2 s2) / (2 mu).
double moment_m2(const HypergroupParams& p, const HermitianMatrix& s1, const HermitianMatrix& s2,
                 const ConePoint& r);

struct MomentSpec {
  std::vector<HermitianMatrix> directions;
  /// 2 or 4; must equal directions.size().
  int order = 2;
};

struct MomentEstimate {
  double value = 0.0;
  /// |Richardson value - finer central difference|.
  double error = 0.0;
};

/// i^k d_{s_1} ... d_{s_k} phi_s(r) at s = 0 by central differences at h and
/// h/2 with one Richardson step.
MomentEstimate moment_numeric(const HypergroupParams& p, const MomentSpec& spec, const ConePoint& r,
                              double h);

/// Default step: 1e-3/(1+||r||) for order 2, 1e-1/(1+||r||) for order 4.
double default_moment_step(int order, const ConePoint& r);

struct CltReport {
  HypergroupParams params{1, 1, 1.0};
  std::string step_law;
  int n = 0;
  int replicas = 0;
  std::uint64_t seed = 0;
  HermitianMatrix sigma2_plugin{1, 1};
  std::optional<HermitianMatrix> sigma2_closed;
  std::vector<ConePoint> grid;
  std::vector<Estimate> estimates;
  std::vector<double> targets;
  std::vector<double> deviations;
  double sup_deviation = 0.0;
};

/// Fourier transform of T_{n^{-1/2} I}(S_n) against exp(-tr(s sigma^2 s)/2)
/// with sigma^2 = E[Y^2]/(2 mu) estimated from the steps drawn in the run.
/// Reusing seed and replicas gives paired runs across n.
CltReport clt_experiment(const HypergroupParams& p, const StepLaw& law, int n, int replicas,
                         const std::vector<ConePoint>& s_grid, std::uint64_t seed,
                         const ReplicaRunner& runner = ReplicaRunner{});

enum class Normalisation { linear, power };

struct SllnReport {
  HypergroupParams params{1, 1, 1.0};
  std::string step_law;
  Normalisation rule = Normalisation::linear;
  double lambda = 1.0;
  int replicas = 0;
  std::uint64_t seed = 0;
  std::vector<int> checkpoints;
  /// ratios[c][i] = ||S_n|| / a_n for checkpoint c, replica i.
  std::vector<std::vector<double>> ratios;
  std::vector<double> max_ratio;
  std::vector<double> median_ratio;
  /// Share of replicas whose last ratio is below the first.
  double fraction_last_below_first = 0.0;
  bool median_decreasing = false;
  /// sum_n a_n^{-2} E||Y||^2, finite for both rules when lambda < 2.
  double summability = 0.0;
};

/// ||S_n|| / a_n on the schedule n = 1, 2, 4, ..., n_max with a_n = n or
/// n^{1/lambda}.
SllnReport slln_experiment(const HypergroupParams& p, const StepLaw& law, Normalisation rule, double lambda,
                           int n_max, int replicas, std::uint64_t seed,
                           const ReplicaRunner& runner = ReplicaRunner{});

struct MartingaleRow {
  int n = 0;
  Estimate phi;
  double target = 0.0;
  double z = 0.0;
  /// Largest |z| over the real and imaginary parts of E[S_n^2] - n E[Y^2].
  double second_moment_z = 0.0;
};

struct MartingaleReport {
  HypergroupParams params{1, 1, 1.0};
  std::string step_law;
  ConePoint s{1, 1};
  double step_transform = 0.0;
  int replicas = 0;
  std::uint64_t seed = 0;
  std::vector<MartingaleRow> rows;
  double max_z = 0.0;
  double max_second_moment_z = 0.0;
};

/// E[phi_s(S_n)] against hat(law)(s)^n and E[S_n^2] against n E[Y^2] for
/// n = 0, 1, 2, 4, ..., n_max. Throws DomainError when hat(law)(s)^n_max < 0.01.
MartingaleReport martingale_check(const HypergroupParams& p, const StepLaw& law, const ConePoint& s,
                                  int n_max, int replicas, std::uint64_t seed,
                                  const ReplicaRunner& runner = ReplicaRunner{});

nlohmann::json to_json(const HypergroupParams& p);
nlohmann::json to_json(const HermitianMatrix& m);
nlohmann::json to_json(const CltReport& r);
nlohmann::json to_json(const SllnReport& r);
nlohmann::json to_json(const MartingaleReport& r);

/// One row per (replica, step) with the path entries row-major.
void write_paths_csv(std::ostream& out, const HypergroupParams& p, std::uint64_t seed,
                     const std::vector<Path>& paths);

}  // namespace conebessel
