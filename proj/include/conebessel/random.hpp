#pragma once

// Seeded random streams and the replica runner the harness hands to
// Monte Carlo routines.

#include <cstdint>
#include <functional>
#include <random>

namespace conebessel {

/// SplitMix64 finaliser; derives independent stream seeds from (root, index).
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (-1, 1).
  double symmetric_uniform() { return 2.0 * uniform() - 1.0; }
  double normal();
  /// Gamma(shape, scale) by Marsaglia-Tsang; shapes below 1 use the
  /// U^{1/shape} boost.
  double gamma(double shape, double scale);
  std::uint64_t next_u64() { return engine_(); }
  /// Uniform index in [0, n).
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Runs independent replicas, replica i on Rng(derive_seed(seed, i)), so
/// results do not depend on the worker count.
class ReplicaRunner {
 public:
  explicit ReplicaRunner(int workers = 1) : workers_(workers < 1 ? 1 : workers) {}

  int workers() const { return workers_; }

  void run(std::size_t replicas, std::uint64_t seed,
           const std::function<void(std::size_t, Rng&)>& body) const;

 private:
  int workers_;
};

}  // namespace conebessel
