#include "conebessel/statistics.hpp"

#include <stdexcept>

namespace conebessel {

Estimate weighted_mean(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size() || values.empty()) {
    throw std::invalid_argument("weighted_mean: need matching nonempty spans");
  }
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw std::invalid_argument("weighted_mean: weights sum to zero");
  double mean = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) mean += weights[i] * values[i];
  mean /= total;
  double var = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = weights[i] / total;
    var += w * w * (values[i] - mean) * (values[i] - mean);
  }
  return {mean, std::sqrt(var), values.size()};
}

double two_sample_z(const Estimate& a, const Estimate& b) {
  const double se = std::hypot(a.std_error, b.std_error);
  const double diff = std::abs(a.value - b.value);
  if (se == 0.0) return diff == 0.0 ? 0.0 : HUGE_VAL;
  return diff / se;
}

double one_sample_z(const Estimate& a, double target) {
  const double diff = std::abs(a.value - target);
  if (a.std_error == 0.0) return diff <= 1e-12 * (1.0 + std::abs(target)) ? 0.0 : HUGE_VAL;
  return diff / a.std_error;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double sup = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return sup;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty sample");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (values.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace conebessel
