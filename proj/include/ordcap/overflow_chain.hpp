#pragma once

#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ordcap/allocation.hpp"
#include "ordcap/arrival.hpp"

namespace ordcap {

/// Value and slope of an overflow transform at one argument.
struct LstPoint {
  double value;
  double derivative;
};

struct ChainOptions {
  std::size_t max_level = 25;
  bool memoize = true;
};

/// Evaluator of the overflow inter-arrival transforms L_n(s).
///
/// L_0 is the exogenous transform and, for n >= 1,
///
///   L_n(s) = L_{n-1}(mu_n + s) / (1 - L_{n-1}(s) + L_{n-1}(mu_n + s)),
///
/// with the derivative obtained by differentiating the quotient. Values and
/// derivatives are computed together. With memoization on they are cached per
/// level under the exact bit pattern of s, which pays off for repeated queries
/// (metrics, curves, derivative after value); one evaluation of L_n(s) touches
/// 2^n distinct arguments, so single probes gain nothing from the cache and run
/// faster with memoization off.
///
/// Not thread-safe: use one chain per thread. Copying a chain copies its cache.
class OverflowChain {
 public:
  OverflowChain(ArrivalModel model, Allocation allocation, ChainOptions options = {});

  const ArrivalModel& model() const { return model_; }
  const Allocation& allocation() const { return allocation_; }
  std::size_t max_level() const { return options_.max_level; }

  /// Highest level n for which L_n is defined (bounded by max_level and the allocation).
  std::size_t available_levels() const;

  double lst(std::size_t n, double s);
  double lst_derivative(std::size_t n, double s);
  LstPoint evaluate(std::size_t n, double s);

  /// ell_n = L_{n-1}(mu_n), the probability that an arrival reaching server n finds it busy.
  double ell(std::size_t n);

  /// E T_n = 1 / (lambda p_n). Returns +inf when p_n underflows to zero.
  double mean_overflow_time(std::size_t n);

  /// ell_n through the iterated product form
  ///   L_0(s_n) / prod_{i<n} [1 - L_{i-1}(mu_{i+1}+..+mu_n) + L_{i-1}(mu_i+..+mu_n)].
  /// A cross-check of the direct recursion, not used by the metrics.
  double ell_product_form(std::size_t n);

  /// Adds mu_{M+1} after the last prefix rate. Cached levels stay valid because L_n depends on
  /// mu_1..mu_n only. The allocation must not carry a tail; ordering is not enforced.
  void append_rate(double rate);

  std::size_t cache_size() const;
  void clear_cache();

 private:
  void check_level(std::size_t n) const;
  LstPoint evaluate_unchecked(std::size_t n, double s);
  LstPoint evaluate_tree(std::size_t n, double s);

  ArrivalModel model_;
  Allocation allocation_;
  ChainOptions options_;
  std::vector<double> rates_;  // rates_[n-1] = mu_n for the levels in reach
  std::vector<std::unordered_map<std::uint64_t, LstPoint>> memo_;
  std::vector<double> scratch_args_;
  std::vector<LstPoint> scratch_points_;
};

/// Free-function spellings used by the CLI and bindings.
inline double overflow_lst(OverflowChain& chain, std::size_t n, double s) { return chain.lst(n, s); }
inline double overflow_lst_derivative(OverflowChain& chain, std::size_t n, double s) {
  return chain.lst_derivative(n, s);
}
inline double mean_overflow_time(OverflowChain& chain, std::size_t n) {
  return chain.mean_overflow_time(n);
}

}  // namespace ordcap
