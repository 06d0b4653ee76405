#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ordcap {

/// Service-rate series under a total capacity: an explicit prefix mu_1..mu_M
/// plus an optional geometric tail mu_n = mu_M * r^(n-M) for n > M.
///
/// Invariants checked at construction:
///  - every prefix rate is strictly positive;
///  - prefix sum (plus the tail mass mu_M r/(1-r), if any) does not exceed the capacity;
///  - the prefix is non-increasing, unless built with allow_unordered() for diagnostics.
class Allocation {
 public:
  Allocation(double capacity, std::vector<double> prefix,
             std::optional<double> tail_ratio = std::nullopt);

  /// Same as the constructor but skips the non-increasing check.
  static Allocation allow_unordered(double capacity, std::vector<double> prefix,
                                    std::optional<double> tail_ratio = std::nullopt);

  double capacity() const { return capacity_; }
  std::size_t prefix_size() const { return prefix_.size(); }
  std::span<const double> prefix() const { return prefix_; }
  std::optional<double> tail_ratio() const { return tail_ratio_; }
  bool has_tail() const { return tail_ratio_.has_value(); }
  bool is_non_increasing() const;

  /// Number of levels with a defined rate (prefix length, or unbounded with a tail).
  std::size_t defined_levels() const;

  /// Rate of server n (1-based). Uses the tail beyond the prefix.
  double rate(std::size_t n) const;

  /// s_n = mu_1 + ... + mu_n.
  double partial_sum(std::size_t n) const;

  /// mu - s_n.
  double remaining(std::size_t n) const { return capacity_ - partial_sum(n); }

  /// Mass carried by the geometric tail (zero without a tail).
  double tail_mass() const;

  /// The same rates with the prefix extended (or cut) to exactly n entries.
  Allocation with_prefix_length(std::size_t n) const;

 private:
  struct Unchecked {};
  Allocation(Unchecked, double capacity, std::vector<double> prefix,
             std::optional<double> tail_ratio, bool require_order);

  double capacity_;
  std::vector<double> prefix_;
  std::optional<double> tail_ratio_;
};

}  // namespace ordcap
