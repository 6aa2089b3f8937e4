#include "conebessel/partition.hpp"

#include <algorithm>
#include <stdexcept>

namespace conebessel {

namespace {

void enumerate(int remaining, int max_part, int slots, std::vector<int>& prefix,
               std::vector<Partition>& out) {
  if (remaining == 0) {
    out.emplace_back(prefix);
    return;
  }
  if (slots == 0) return;
  for (int part = std::min(remaining, max_part); part >= 1; --part) {
    prefix.push_back(part);
    enumerate(remaining - part, part, slots - 1, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

Partition::Partition(std::initializer_list<int> parts)
    : Partition(std::vector<int>(parts)) {}

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
  while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i] < 0 || (i > 0 && parts_[i] > parts_[i - 1])) {
      throw std::invalid_argument("partition parts must be nonincreasing and nonnegative");
    }
    weight_ += parts_[i];
  }
}

int Partition::conjugate(int j) const {
  int count = 0;
  for (int p : parts_) {
    if (p > j) ++count;
  }
  return count;
}

std::string Partition::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(parts_[i]);
  }
  return s + ")";
}

std::vector<Partition> partitions(int k, int max_parts) {
  if (k < 0 || max_parts < 1) throw std::invalid_argument("partitions: need k >= 0, max_parts >= 1");
  std::vector<Partition> out;
  std::vector<int> prefix;
  enumerate(k, k, max_parts, prefix, out);
  return out;
}

}  // namespace conebessel
