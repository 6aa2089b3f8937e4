#pragma once

// Run configuration for the command-line harness: flat key=value files,
// defaults and validation.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "conebessel/cone_core.hpp"

namespace conebessel::cli {

/// Bad configuration or input; the harness exits with status 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string command;
  std::optional<int> q;
  std::optional<int> d;
  std::optional<double> mu;
  std::uint64_t seed = 7;
  int workers = 1;
  std::string output;

  std::size_t n_samples = 100000;
  double tol = 1e-8;

  // eval-bessel
  std::string x;
  std::string diag;
  // conv, and the character pair for eval-bessel
  std::string r;
  std::string s;
  // wishart
  std::string cov;
  double t = 1.0;
  std::string density_at;
  // clt, slln
  std::string step = "point";
  std::string r0;
  std::string step_file;
  int n_steps = 64;
  int replicas = 2000;
  int grid_count = 8;
  double grid_scale = 1.0;
  std::string rule = "n";
  double lambda = 1.0;
  int n_max = 4096;
  std::string paths;
  // check
  std::string criteria;
  double sample_scale = 1.0;
};

/// Every key accepted in config files (flag names use '-' for '_').
const std::set<std::string>& config_keys();

/// Sets one field from text; throws ValidationError naming the field.
void set_field(RunConfig& cfg, const std::string& key, const std::string& value);

/// key=value lines; '#' starts a comment. Only keys not in `skip` are applied.
/// Errors carry "path:line".
void apply_config_file(RunConfig& cfg, const std::string& path, const std::set<std::string>& skip = {});

/// Reads a config file over the defaults.
RunConfig load_config(const std::string& path);

/// Seed default from CONEBESSEL_SEED when set.
std::uint64_t default_seed();

/// The (q, d, mu) of the run; throws ValidationError when missing or out of
/// range. Convolution-dependent commands need mu > rho - 1; the others need
/// mu > (d/2)(q - 1).
HypergroupParams validated_params(const RunConfig& cfg);

/// True for commands that draw convolution samples.
bool needs_convolution(const std::string& command);

}  // namespace conebessel::cli
