#include "ordcap/allocation.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ordcap/errors.hpp"

namespace ordcap {

namespace {

// Relative slack on the capacity constraint; prefix sums are accumulated in floating point.
constexpr double kCapacitySlack = 1e-12;

}  // namespace

Allocation::Allocation(double capacity, std::vector<double> prefix, std::optional<double> tail_ratio)
    : Allocation(Unchecked{}, capacity, std::move(prefix), tail_ratio, true) {}

Allocation Allocation::allow_unordered(double capacity, std::vector<double> prefix,
                                       std::optional<double> tail_ratio) {
  return Allocation(Unchecked{}, capacity, std::move(prefix), tail_ratio, false);
}

Allocation::Allocation(Unchecked, double capacity, std::vector<double> prefix,
                       std::optional<double> tail_ratio, bool require_order)
    : capacity_(capacity), prefix_(std::move(prefix)), tail_ratio_(tail_ratio) {
  if (!(capacity_ > 0.0) || !std::isfinite(capacity_)) {
    throw DomainError("total capacity must be positive and finite");
  }
  for (std::size_t i = 0; i < prefix_.size(); ++i) {
    if (!(prefix_[i] > 0.0) || !std::isfinite(prefix_[i])) {
      throw DomainError("service rate mu_" + std::to_string(i + 1) + " must be positive");
    }
  }
  if (tail_ratio_) {
    if (!(*tail_ratio_ > 0.0 && *tail_ratio_ < 1.0)) {
      throw DomainError("geometric tail ratio must lie in (0,1)");
    }
    if (prefix_.empty()) throw DomainError("a geometric tail needs at least one prefix rate");
  }
  if (require_order && !is_non_increasing()) {
    throw InvariantError("service rates must be non-increasing (fastest server first)");
  }
  const double used = partial_sum(prefix_.size()) + tail_mass();
  // r/(1-r) carries the rounding of r amplified by 1/(1-r)
  double slack = kCapacitySlack;
  if (tail_ratio_) slack += 4.0 * std::numeric_limits<double>::epsilon() / (1.0 - *tail_ratio_);
  if (used > capacity_ * (1.0 + slack)) {
    throw CapacityError("allocated rates exceed the total capacity");
  }
}

bool Allocation::is_non_increasing() const {
  for (std::size_t i = 1; i < prefix_.size(); ++i) {
    if (prefix_[i] > prefix_[i - 1]) return false;
  }
  return true;
}

std::size_t Allocation::defined_levels() const {
  return tail_ratio_ ? std::numeric_limits<std::size_t>::max() : prefix_.size();
}

double Allocation::rate(std::size_t n) const {
  if (n == 0) throw LevelError("server indices start at 1");
  if (n <= prefix_.size()) return prefix_[n - 1];
  if (!tail_ratio_) {
    throw LevelError("rate of server " + std::to_string(n) + " requested but the allocation defines " +
                     std::to_string(prefix_.size()));
  }
  return prefix_.back() * std::pow(*tail_ratio_, static_cast<double>(n - prefix_.size()));
}

double Allocation::partial_sum(std::size_t n) const {
  double sum = 0.0;
  for (std::size_t i = 1; i <= n; ++i) sum += rate(i);
  return sum;
}

double Allocation::tail_mass() const {
  if (!tail_ratio_) return 0.0;
  const double r = *tail_ratio_;
  return prefix_.back() * r / (1.0 - r);
}

Allocation Allocation::with_prefix_length(std::size_t n) const {
  std::vector<double> rates;
  rates.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) rates.push_back(rate(i));
  std::optional<double> tail = n >= prefix_.size() ? tail_ratio_ : std::nullopt;
  return Allocation(Unchecked{}, capacity_, std::move(rates), tail, false);
}

}  // namespace ordcap
