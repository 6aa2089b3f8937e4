#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>

namespace conebessel::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw ValidationError("field '" + key + "': cannot parse '" + value + "' as a number");
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

template <class T, class M>
Setter number(M RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = parse_number<T>(k, v); };
}

Setter text(std::string RunConfig::*field) {
  return [field](RunConfig& c, const std::string&, const std::string& v) { c.*field = v; };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"command", text(&RunConfig::command)},
      {"q", number<int>(&RunConfig::q)},
      {"d", number<int>(&RunConfig::d)},
      {"mu", number<double>(&RunConfig::mu)},
      {"seed", number<std::uint64_t>(&RunConfig::seed)},
      {"workers", number<int>(&RunConfig::workers)},
      {"output", text(&RunConfig::output)},
      {"n_samples",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         // accepts 1e5
         const double n = parse_number<double>(k, v);
         if (!(n >= 1.0) || n != std::floor(n)) throw ValidationError("field 'n_samples': need a positive integer");
         c.n_samples = static_cast<std::size_t>(n);
       }},
      {"tol", number<double>(&RunConfig::tol)},
      {"x", text(&RunConfig::x)},
      {"diag", text(&RunConfig::diag)},
      {"r", text(&RunConfig::r)},
      {"s", text(&RunConfig::s)},
      {"cov", text(&RunConfig::cov)},
      {"t", number<double>(&RunConfig::t)},
      {"density_at", text(&RunConfig::density_at)},
      {"step", text(&RunConfig::step)},
      {"r0", text(&RunConfig::r0)},
      {"step_file", text(&RunConfig::step_file)},
      {"n_steps", number<int>(&RunConfig::n_steps)},
      {"replicas", number<int>(&RunConfig::replicas)},
      {"grid_count", number<int>(&RunConfig::grid_count)},
      {"grid_scale", number<double>(&RunConfig::grid_scale)},
      {"rule", text(&RunConfig::rule)},
      {"lambda", number<double>(&RunConfig::lambda)},
      {"n_max", number<int>(&RunConfig::n_max)},
      {"paths", text(&RunConfig::paths)},
      {"criteria", text(&RunConfig::criteria)},
      {"sample_scale", number<double>(&RunConfig::sample_scale)},
  };
  return table;
}

}  // namespace

const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys = [] {
    std::set<std::string> out;
    for (const auto& [k, v] : setters()) out.insert(k);
    return out;
  }();
  return keys;
}

void set_field(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ValidationError("unknown field '" + key + "'");
  it->second(cfg, key, value);
}

void apply_config_file(RunConfig& cfg, const std::string& path, const std::set<std::string>& skip) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = path + ":" + std::to_string(number) + ": ";
    if (eq == std::string::npos) throw ValidationError(where + "expected key=value, got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    for (char& ch : key) {
      if (ch == '-') ch = '_';
    }
    const std::string value = trim(line.substr(eq + 1));
    if (skip.count(key)) continue;
    try {
      set_field(cfg, key, value);
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
  }
}

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  cfg.seed = default_seed();
  apply_config_file(cfg, path);
  return cfg;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CONEBESSEL_SEED")) {
    try {
      return parse_number<std::uint64_t>("CONEBESSEL_SEED", env);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("environment: ") + e.what());
    }
  }
  return 7;
}

bool needs_convolution(const std::string& command) {
  return command == "conv" || command == "clt" || command == "slln" || command == "check";
}

HypergroupParams validated_params(const RunConfig& cfg) {
  if (!cfg.q || !cfg.d || !cfg.mu) throw ValidationError("q, d and mu are required for '" + cfg.command + "'");
  if (*cfg.d != 1 && *cfg.d != 2) {
    throw ValidationError("unsupported field: d = " + std::to_string(*cfg.d) +
                          "; only d = 1 (real) and d = 2 (complex) are supported");
  }
  if (*cfg.q < 1 || *cfg.q > kMaxDim) {
    throw ValidationError("q = " + std::to_string(*cfg.q) + " out of range [1, " + std::to_string(kMaxDim) + "]");
  }
  try {
    return HypergroupParams(*cfg.q, *cfg.d, *cfg.mu,
                            needs_convolution(cfg.command) ? IndexRange::hypergroup : IndexRange::wishart);
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
}

}  // namespace conebessel::cli
