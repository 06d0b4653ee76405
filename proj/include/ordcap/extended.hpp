#pragma once

#include <compare>
#include <limits>

namespace ordcap {

/// Nonnegative-or-infinite quantity (delays, residuals). The infinite state is explicit so that
/// a divergent tail never turns into NaN through arithmetic.
class Extended {
 public:
  constexpr Extended() = default;
  constexpr explicit Extended(double value) : value_(value) {}

  static constexpr Extended infinite() {
    Extended e;
    e.infinite_ = true;
    return e;
  }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr bool is_finite() const { return !infinite_; }

  /// Finite value; +inf for the sentinel (for output and comparisons only).
  constexpr double value() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend constexpr Extended operator+(Extended a, Extended b) {
    if (a.infinite_ || b.infinite_) return infinite();
    return Extended(a.value_ + b.value_);
  }
  friend constexpr Extended operator+(Extended a, double b) { return a + Extended(b); }

  friend constexpr bool operator==(Extended a, Extended b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend constexpr std::partial_ordering operator<=>(Extended a, Extended b) {
    return a.value() <=> b.value();
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

}  // namespace ordcap
