#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace conebessel {

/// Monte Carlo estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Welford accumulator.
class RunningMean {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  Estimate estimate() const {
    return {mean_, n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0, n_};
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Self-normalised weighted mean; the standard error is the delta-method
/// value sqrt(sum w_i^2 (x_i - m)^2) with w normalised.
Estimate weighted_mean(std::span<const double> values, std::span<const double> weights);

/// (a - b) / sqrt(se_a^2 + se_b^2); zero when both errors vanish and the
/// estimates agree.
double two_sample_z(const Estimate& a, const Estimate& b);

/// |estimate - target| / stderr, with the same zero convention.
double one_sample_z(const Estimate& a, double target);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// sup |F_n - F| for a continuous reference CDF.
template <class Cdf>
double ks_one_sample(std::vector<double> sample, Cdf&& cdf);

double median(std::vector<double> values);

}  // namespace conebessel

#include <algorithm>

namespace conebessel {

template <class Cdf>
double ks_one_sample(std::vector<double> sample, Cdf&& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    sup = std::max({sup, std::abs(f - static_cast<double>(i) / n),
                    std::abs(static_cast<double>(i + 1) / n - f)});
  }
  return sup;
}

}  // namespace conebessel
