#pragma once

// The acceptance suite: one runnable check per numbered criterion.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conebessel/cone_core.hpp"
#include "json.hpp"

namespace conebessel {

struct CheckOptions {
  std::uint64_t seed = 7;
  int workers = 1;
  /// Restrict parameter sweeps to one (q, d, mu); criteria pinned to other
  /// parameters are then skipped.
  std::optional<HypergroupParams> only;
  /// Multiplies every Monte Carlo budget; 1 runs the stated sizes.
  double sample_scale = 1.0;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  bool skipped = false;
  std::string detail;
  double seconds = 0.0;
  nlohmann::json data;
};

struct CriterionInfo {
  int id;
  const char* name;
};

const std::vector<CriterionInfo>& criteria();

/// Criterion 6 audits every convolution sample drawn since the last
/// reset_support_audit() together with a sweep of its own.
CriterionResult run_criterion(int id, const CheckOptions& opts);

/// Runs the given ids (all when empty) after resetting the support audit;
/// criterion 6 runs last.
std::vector<CriterionResult> run_checks(const CheckOptions& opts, std::vector<int> ids = {});

/// "PASS  3  name  detail  (1.2 s)"
std::string summary_line(const CriterionResult& r);

nlohmann::json to_json(const CriterionResult& r);

}  // namespace conebessel
