// conebessel command-line harness.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "conebessel/ball_measure.hpp"
#include "conebessel/checks.hpp"
#include "conebessel/hypergroup_algebra.hpp"
#include "conebessel/jack_series.hpp"
#include "conebessel/randwalk_limits.hpp"
#include "conebessel/version.hpp"
#include "conebessel/wishart.hpp"
#include "json.hpp"
#include "run_config.hpp"

using namespace conebessel;
using conebessel::cli::RunConfig;
using conebessel::cli::ValidationError;
using Json = nlohmann::json;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitCheckFailed = 2;

const std::map<std::string, std::string>& option_help() {
  static const std::map<std::string, std::string> help{
      {"command", "subcommand (config files only)"},
      {"q", "matrix size"},
      {"d", "field: 1 real, 2 complex"},
      {"mu", "index mu"},
      {"seed", "root seed (default: CONEBESSEL_SEED or 7)"},
      {"workers", "replica worker threads"},
      {"output", "output file (default: stdout)"},
      {"n_samples", "Monte Carlo sample count (default 1e5)"},
      {"tol", "series tolerance (default 1e-8)"},
      {"x", "eval-bessel: matrix file for the argument"},
      {"diag", "eval-bessel: comma-separated diagonal argument"},
      {"r", "matrix file for r"},
      {"s", "matrix file for s"},
      {"cov", "wishart/step law: covariance matrix file (default identity)"},
      {"t", "wishart/step law: time parameter"},
      {"density_at", "wishart: evaluate the density at this matrix file"},
      {"step", "step law: point, wishart or file"},
      {"r0", "step law point: matrix file (default identity)"},
      {"step_file", "step law file: samples CSV"},
      {"n_steps", "clt: walk length"},
      {"replicas", "clt/slln: replica count"},
      {"grid_count", "clt: s-grid size"},
      {"grid_scale", "clt: s-grid scale"},
      {"rule", "slln: normalisation n or power"},
      {"lambda", "slln: exponent for a_n = n^(1/lambda)"},
      {"n_max", "slln: last checkpoint"},
      {"paths", "clt/slln: also write walk paths to this CSV"},
      {"criteria", "check: comma-separated criterion ids (default all)"},
      {"sample_scale", "check: multiplies the Monte Carlo budgets"},
  };
  return help;
}

Json metadata(const RunConfig& cfg, const std::optional<HypergroupParams>& p) {
  Json j{{"version", kVersion}, {"seed", cfg.seed}, {"workers", cfg.workers}, {"command", cfg.command}};
  if (p) j["params"] = to_json(*p);
  return j;
}

/// Writes to cfg.output, or stdout when empty.
void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.output);
  if (!out) throw ValidationError("cannot write '" + cfg.output + "'");
  out << text;
}

void emit_json(const RunConfig& cfg, const Json& j) { emit(cfg, j.dump(2) + "\n"); }

/// Appends workers= to the "# conebessel" metadata line.
std::string with_workers(std::string csv, int workers) {
  const auto eol = csv.find('\n');
  csv.insert(eol, " workers=" + std::to_string(workers));
  return csv;
}

SquareMatrix load(const std::string& path, const HypergroupParams& p, const std::string& what) {
  SquareMatrix m(1, 1);
  try {
    m = load_matrix(path);
  } catch (const Error& e) {
    throw ValidationError(what + ": " + e.what());
  }
  if (m.q() != p.q() || m.d() != p.d()) {
    throw ValidationError(what + ": file '" + path + "' holds a " + std::to_string(m.q()) + "x" +
                          std::to_string(m.q()) + " d=" + std::to_string(m.d()) + " matrix, expected q=" +
                          std::to_string(p.q()) + " d=" + std::to_string(p.d()));
  }
  return m;
}

HermitianMatrix load_hermitian(const std::string& path, const HypergroupParams& p, const std::string& what) {
  try {
    return HermitianMatrix(load(path, p, what));
  } catch (const DomainError& e) {
    throw ValidationError(what + ": " + e.what());
  }
}

ConePoint load_cone(const std::string& path, const HypergroupParams& p, const std::string& what) {
  try {
    return ConePoint(load_hermitian(path, p, what));
  } catch (const DomainError& e) {
    throw ValidationError(what + ": " + e.what());
  }
}

StepLaw step_law(const RunConfig& cfg, const HypergroupParams& p) {
  if (cfg.step == "point") {
    return PointMassStep{cfg.r0.empty() ? ConePoint::identity(p.q(), p.d()) : load_cone(cfg.r0, p, "r0")};
  }
  if (cfg.step == "wishart") {
    const ConePoint cov = cfg.cov.empty() ? ConePoint::identity(p.q(), p.d()) : load_cone(cfg.cov, p, "cov");
    if (!(cfg.t > 0.0)) throw ValidationError("t must be positive");
    return WishartStep{{p, cov, cfg.t}};
  }
  if (cfg.step == "file") {
    std::ifstream in(cfg.step_file);
    if (!in) throw ValidationError("cannot open step_file '" + cfg.step_file + "'");
    EmpiricalMeasure m;
    try {
      m = read_csv(in);
    } catch (const Error& e) {
      throw ValidationError("step_file: " + std::string(e.what()));
    }
    if (m.q != p.q() || m.d != p.d()) throw ValidationError("step_file: sample shape differs from (q, d)");
    return EmpiricalStep(std::move(m));
  }
  throw ValidationError("step must be point, wishart or file, got '" + cfg.step + "'");
}

void require_positive(int value, const char* name) {
  if (value < 1) throw ValidationError(std::string(name) + " must be at least 1");
}

int cmd_eval_bessel(const RunConfig& cfg) {
  const HypergroupParams p = cli::validated_params(cfg);
  Json j = metadata(cfg, p);
  if (!cfg.r.empty() || !cfg.s.empty()) {
    if (cfg.r.empty() || cfg.s.empty()) throw ValidationError("eval-bessel: the character needs both --r and --s");
    const ConePoint r = load_cone(cfg.r, p, "r");
    const ConePoint s = load_cone(cfg.s, p, "s");
    j["character"] = true;
    j["value"] = character_phi(p, s, r, cfg.tol);
    emit_json(cfg, j);
    return 0;
  }
  HermitianMatrix x(p.q(), p.d());
  if (!cfg.x.empty()) {
    x = load_hermitian(cfg.x, p, "x");
  } else if (!cfg.diag.empty()) {
    std::vector<double> diag;
    std::stringstream ss(cfg.diag);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        diag.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ValidationError("diag: cannot parse '" + item + "'");
      }
    }
    if (static_cast<int>(diag.size()) != p.q()) throw ValidationError("diag: need q entries");
    x = HermitianMatrix::diagonal(p.d(), diag);
  }
  const BesselEval e = bessel_J(p, p.mu(), x, cfg.tol);
  j["value"] = e.value;
  j["truncation_bound"] = e.truncation_bound;
  j["degree_used"] = e.degree_used;
  j["rounding_estimate"] = e.rounding_estimate;
  emit_json(cfg, j);
  return 0;
}

/// Samples in blocks of 1024 on streams (seed, block) so output does not
/// depend on the worker count.
template <class F>
std::vector<ConePoint> blocked_samples(const RunConfig& cfg, const HypergroupParams& p, F&& draw) {
  constexpr std::size_t kBlock = 1024;
  std::vector<ConePoint> out(cfg.n_samples, ConePoint::zero(p.q(), p.d()));
  const std::size_t blocks = (cfg.n_samples + kBlock - 1) / kBlock;
  ReplicaRunner(cfg.workers).run(blocks, cfg.seed, [&](std::size_t b, Rng& rng) {
    const std::size_t end = std::min(cfg.n_samples, (b + 1) * kBlock);
    for (std::size_t k = b * kBlock; k < end; ++k) out[k] = draw(rng);
  });
  return out;
}

void emit_samples(const RunConfig& cfg, const HypergroupParams& p, std::vector<ConePoint> pts) {
  std::ostringstream csv;
  write_csv(csv, EmpiricalMeasure::uniform(p, std::move(pts), cfg.seed));
  emit(cfg, with_workers(csv.str(), cfg.workers));
}

int cmd_conv(const RunConfig& cfg) {
  const HypergroupParams p = cli::validated_params(cfg);
  if (cfg.r.empty() || cfg.s.empty()) throw ValidationError("conv: --r and --s are required");
  const ConePoint r = load_cone(cfg.r, p, "r");
  const ConePoint s = load_cone(cfg.s, p, "s");
  emit_samples(cfg, p, blocked_samples(cfg, p, [&](Rng& rng) { return conv_sample(p, r, s, rng); }));
  return 0;
}

int cmd_wishart(const RunConfig& cfg) {
  const HypergroupParams p = cli::validated_params(cfg);
  const ConePoint cov = cfg.cov.empty() ? ConePoint::identity(p.q(), p.d()) : load_cone(cfg.cov, p, "cov");
  if (!(cfg.t >= 0.0)) throw ValidationError("t must be nonnegative");
  const WishartSpec spec{p, cov, cfg.t};
  if (!cfg.density_at.empty()) {
    Json j = metadata(cfg, p);
    j["density"] = density(spec, load_cone(cfg.density_at, p, "density_at"));
    emit_json(cfg, j);
    return 0;
  }
  emit_samples(cfg, p, blocked_samples(cfg, p, [&](Rng& rng) { return sample_scaled(spec, rng); }));
  return 0;
}

void write_paths(const RunConfig& cfg, const HypergroupParams& p, const StepLaw& law, int n_steps, int replicas) {
  if (cfg.paths.empty()) return;
  const auto paths = walk_simulate({p, law, n_steps, replicas, cfg.seed}, ReplicaRunner(cfg.workers));
  std::ostringstream csv;
  write_paths_csv(csv, p, cfg.seed, paths);
  std::ofstream out(cfg.paths);
  if (!out) throw ValidationError("cannot write '" + cfg.paths + "'");
  out << with_workers(csv.str(), cfg.workers);
}

int cmd_clt(const RunConfig& cfg) {
  const HypergroupParams p = cli::validated_params(cfg);
  require_positive(cfg.n_steps, "n_steps");
  require_positive(cfg.replicas, "replicas");
  require_positive(cfg.grid_count, "grid_count");
  const StepLaw law = step_law(cfg, p);
  const auto grid = default_s_grid(p.q(), p.d(), cfg.grid_count, cfg.grid_scale);
  const CltReport r = clt_experiment(p, law, cfg.n_steps, cfg.replicas, grid, cfg.seed, ReplicaRunner(cfg.workers));
  Json j = to_json(r);
  j["workers"] = cfg.workers;
  emit_json(cfg, j);
  write_paths(cfg, p, law, cfg.n_steps, cfg.replicas);
  return 0;
}

int cmd_slln(const RunConfig& cfg) {
  const HypergroupParams p = cli::validated_params(cfg);
  require_positive(cfg.n_max, "n_max");
  require_positive(cfg.replicas, "replicas");
  Normalisation rule;
  if (cfg.rule == "n") {
    rule = Normalisation::linear;
  } else if (cfg.rule == "power") {
    rule = Normalisation::power;
    if (!(cfg.lambda > 0.0 && cfg.lambda < 2.0)) throw ValidationError("lambda must lie in (0, 2)");
  } else {
    throw ValidationError("rule must be n or power, got '" + cfg.rule + "'");
  }
  const StepLaw law = step_law(cfg, p);
  const SllnReport r = slln_experiment(p, law, rule, cfg.lambda, cfg.n_max, cfg.replicas, cfg.seed,
                                       ReplicaRunner(cfg.workers));
  Json j = to_json(r);
  j["workers"] = cfg.workers;
  emit_json(cfg, j);
  write_paths(cfg, p, law, cfg.n_max, cfg.replicas);
  return 0;
}

int cmd_check(const RunConfig& cfg) {
  CheckOptions opts;
  opts.seed = cfg.seed;
  opts.workers = cfg.workers;
  if (!(cfg.sample_scale > 0.0)) throw ValidationError("sample_scale must be positive");
  opts.sample_scale = cfg.sample_scale;
  if (cfg.q || cfg.d || cfg.mu) opts.only = cli::validated_params(cfg);
  std::vector<int> ids;
  std::stringstream ss(cfg.criteria);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    int id = 0;
    try {
      id = std::stoi(item);
    } catch (const std::exception&) {
      throw ValidationError("criteria: cannot parse '" + item + "'");
    }
    if (id < 1 || id > static_cast<int>(criteria().size())) {
      throw ValidationError("criteria: no criterion " + item);
    }
    ids.push_back(id);
  }
  const auto results = run_checks(opts, ids);
  Json j = metadata(cfg, opts.only);
  j["sample_scale"] = opts.sample_scale;
  j["results"] = Json::array();
  bool ok = true;
  std::ostream& lines = cfg.output.empty() ? std::cerr : std::cout;
  for (const auto& r : results) {
    lines << summary_line(r) << std::endl;
    j["results"].push_back(to_json(r));
    ok &= r.passed;
  }
  j["passed"] = ok;
  emit_json(cfg, j);
  return ok ? 0 : kExitCheckFailed;
}

int fail(const std::string& kind, const std::string& message, int code) {
  std::cerr << Json{{"error", kind}, {"message", message}}.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bessel functions, convolutions and random walks on matrix cones (conebessel " +
               std::string(kVersion) + ")"};
  app.set_version_flag("--version", std::string(kVersion));
  std::string config_path;
  app.add_option("--config", config_path, "key=value config file; flags take precedence");
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::Option*> options;
  for (const auto& key : cli::config_keys()) {
    if (key == "command") continue;
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    options[key] = app.add_option("--" + name, flags[key], option_help().at(key));
  }
  const std::vector<std::pair<std::string, std::string>> commands{
      {"eval-bessel", "evaluate J_mu at a matrix (or phi_s(r) with --r and --s)"},
      {"conv", "sample the convolution of point masses at r and s"},
      {"wishart", "sample the squared Wishart law or evaluate its density"},
      {"clt", "central limit experiment for a random walk"},
      {"slln", "strong law experiment for a random walk"},
      {"check", "run the acceptance criteria"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  RunConfig cfg;
  try {
    cfg.seed = cli::default_seed();
    std::set<std::string> given;
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) given.insert(key);
    }
    if (!config_path.empty()) cli::apply_config_file(cfg, config_path, given);
    for (const auto& key : given) cli::set_field(cfg, key, flags[key]);
    if (!app.get_subcommands().empty()) cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.command.empty()) throw ValidationError("no command given; see --help");
    require_positive(cfg.workers, "workers");
    if (!(cfg.tol > 0.0)) throw ValidationError("tol must be positive");

    if (cfg.command == "eval-bessel") return cmd_eval_bessel(cfg);
    if (cfg.command == "conv") return cmd_conv(cfg);
    if (cfg.command == "wishart") return cmd_wishart(cfg);
    if (cfg.command == "clt") return cmd_clt(cfg);
    if (cfg.command == "slln") return cmd_slln(cfg);
    if (cfg.command == "check") return cmd_check(cfg);
    throw ValidationError("unknown command '" + cfg.command + "'");
  } catch (const ValidationError& e) {
    return fail("validation", e.what(), kExitValidation);
  } catch (const DomainError& e) {
    return fail("validation", e.what(), kExitValidation);
  } catch (const SeriesCapError& e) {
    return fail("series_cap", e.what(), kExitValidation);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), kExitValidation);
  }
}
