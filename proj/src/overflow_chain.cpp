#include "ordcap/overflow_chain.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <string>

#include "ordcap/errors.hpp"

namespace ordcap {

namespace {

constexpr double kMinDenominator = 1e-300;

// Unmemoized evaluation walks levels at or below this bottom-up over a flat buffer.
constexpr std::size_t kTreeLevels = 16;

// Same arithmetic as ArrivalModel::lst_derivative, without evaluating the transform twice.
LstPoint leaf(const ArrivalModel& model, double s) {
  const double value = model.lst(s);
  return {value, -model.shape() / (model.shape() * model.rate() + s) * value};
}

LstPoint combine(const LstPoint& here, const LstPoint& shifted, std::size_t n) {
  const double denominator = 1.0 - here.value + shifted.value;
  if (!(denominator > kMinDenominator)) {
    throw NumericError("degenerate overflow recursion denominator at level " + std::to_string(n));
  }
  return {shifted.value / denominator,
          (shifted.derivative * (1.0 - here.value) + here.derivative * shifted.value) /
              (denominator * denominator)};
}

}  // namespace

OverflowChain::OverflowChain(ArrivalModel model, Allocation allocation, ChainOptions options)
    : model_(model), allocation_(std::move(allocation)), options_(options) {
  const std::size_t levels = std::min(options_.max_level, allocation_.defined_levels());
  rates_.reserve(levels);
  for (std::size_t n = 1; n <= levels; ++n) rates_.push_back(allocation_.rate(n));
  memo_.resize(levels + 1);
}

std::size_t OverflowChain::available_levels() const { return rates_.size(); }

void OverflowChain::check_level(std::size_t n) const {
  if (n > options_.max_level) {
    throw LevelError("level " + std::to_string(n) + " exceeds the chain limit " +
                     std::to_string(options_.max_level));
  }
  if (n > rates_.size()) {
    throw LevelError("level " + std::to_string(n) + " needs rates the allocation does not define (" +
                     std::to_string(rates_.size()) + " available)");
  }
}

double OverflowChain::lst(std::size_t n, double s) { return evaluate(n, s).value; }

double OverflowChain::lst_derivative(std::size_t n, double s) { return evaluate(n, s).derivative; }

LstPoint OverflowChain::evaluate(std::size_t n, double s) {
  check_level(n);
  if (!(s >= 0.0)) throw DomainError("LST argument must be nonnegative");
  return evaluate_unchecked(n, s);
}

LstPoint OverflowChain::evaluate_unchecked(std::size_t n, double s) {
  if (n == 0) return leaf(model_, s);
  if (!options_.memoize && n <= kTreeLevels) return evaluate_tree(n, s);

  auto& level_memo = memo_[n];
  const auto key = std::bit_cast<std::uint64_t>(s);
  if (options_.memoize) {
    if (auto it = level_memo.find(key); it != level_memo.end()) return it->second;
  }

  const double mu = rates_[n - 1];
  const LstPoint result = combine(evaluate_unchecked(n - 1, s), evaluate_unchecked(n - 1, mu + s), n);
  if (options_.memoize) level_memo.emplace(key, result);
  return result;
}

LstPoint OverflowChain::evaluate_tree(std::size_t n, double s) {
  // Node j at level m has children 2j (argument x) and 2j+1 (argument mu_m + x) at level m-1,
  // the same arguments and arithmetic as the recursion.
  const std::size_t leaves = std::size_t{1} << n;
  scratch_args_.resize(leaves);
  scratch_points_.resize(leaves);
  scratch_args_[0] = s;
  for (std::size_t m = n, width = 1; m >= 1; --m, width *= 2) {
    const double mu = rates_[m - 1];
    for (std::size_t i = width; i-- > 0;) {
      const double x = scratch_args_[i];
      scratch_args_[2 * i + 1] = mu + x;
      scratch_args_[2 * i] = x;
    }
  }
  for (std::size_t i = 0; i < leaves; ++i) {
    scratch_points_[i] = leaf(model_, scratch_args_[i]);
  }
  for (std::size_t m = 1, width = leaves / 2; m <= n; ++m, width /= 2) {
    for (std::size_t j = 0; j < width; ++j) {
      scratch_points_[j] = combine(scratch_points_[2 * j], scratch_points_[2 * j + 1], m);
    }
  }
  return scratch_points_[0];
}

double OverflowChain::ell(std::size_t n) {
  if (n == 0) throw LevelError("ell is defined for servers n >= 1");
  check_level(n - 1);
  if (n > rates_.size()) check_level(n);
  return evaluate_unchecked(n - 1, rates_[n - 1]).value;
}

double OverflowChain::mean_overflow_time(std::size_t n) {
  double blocking = 1.0;
  for (std::size_t i = 1; i <= n; ++i) blocking *= ell(i);
  if (blocking <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (model_.rate() * blocking);
}

double OverflowChain::ell_product_form(std::size_t n) {
  if (n == 0) throw LevelError("ell is defined for servers n >= 1");
  check_level(n);
  // suffix[i] = mu_i + ... + mu_n, accumulated from the back like the recursion does
  std::vector<double> suffix(n + 2, 0.0);
  for (std::size_t i = n; i >= 1; --i) suffix[i] = rates_[i - 1] + suffix[i + 1];
  double denominator = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    denominator *= 1.0 - evaluate_unchecked(i - 1, suffix[i + 1]).value +
                   evaluate_unchecked(i - 1, suffix[i]).value;
  }
  return model_.lst(suffix[1]) / denominator;
}

void OverflowChain::append_rate(double rate) {
  if (allocation_.has_tail()) throw DomainError("cannot append a rate to an allocation with a tail");
  if (rates_.size() >= options_.max_level) {
    throw LevelError("appending a rate would exceed the chain limit " + std::to_string(options_.max_level));
  }
  std::vector<double> prefix(allocation_.prefix().begin(), allocation_.prefix().end());
  prefix.push_back(rate);
  allocation_ = Allocation::allow_unordered(allocation_.capacity(), std::move(prefix));
  rates_.push_back(rate);
  memo_.emplace_back();
}

std::size_t OverflowChain::cache_size() const {
  std::size_t total = 0;
  for (const auto& level : memo_) total += level.size();
  return total;
}

void OverflowChain::clear_cache() {
  for (auto& level : memo_) level.clear();
}

}  // namespace ordcap
