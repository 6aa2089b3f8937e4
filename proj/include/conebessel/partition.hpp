#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace conebessel {

/// Nonincreasing sequence of nonnegative integers. Trailing zeros are
/// dropped on construction, so (2,1,0) and (2,1) compare equal.
class Partition {
 public:
  Partition() = default;
  Partition(std::initializer_list<int> parts);
  explicit Partition(std::vector<int> parts);

  const std::vector<int>& parts() const { return parts_; }
  int weight() const { return weight_; }
  /// Number of nonzero parts.
  int length() const { return static_cast<int>(parts_.size()); }
  /// lambda_i with 0-based i; zero past the last part.
  int operator[](std::size_t i) const { return i < parts_.size() ? parts_[i] : 0; }
  /// Column length lambda'_j (0-based j).
  int conjugate(int j) const;

  std::string to_string() const;

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition& a, const Partition& b) {
    return a.parts_ <=> b.parts_;
  }

 private:
  std::vector<int> parts_;
  int weight_ = 0;
};

/// All partitions of k with at most max_parts parts, in descending
/// lexicographic order.
std::vector<Partition> partitions(int k, int max_parts);

}  // namespace conebessel
