#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ordcap/allocation.hpp"
#include "ordcap/arrival.hpp"
#include "ordcap/overflow_chain.hpp"

namespace ordcap {

struct FeasibilityVerdict {
  enum class Kind { Feasible, Infeasible, Inconclusive };
  Kind kind = Kind::Inconclusive;
  std::size_t level = 0;  // first violating level when Infeasible

  static FeasibilityVerdict feasible() { return {Kind::Feasible, 0}; }
  static FeasibilityVerdict infeasible(std::size_t level) { return {Kind::Infeasible, level}; }
  static FeasibilityVerdict inconclusive() { return {Kind::Inconclusive, 0}; }

  friend bool operator==(const FeasibilityVerdict&, const FeasibilityVerdict&) = default;
};

std::string to_string(const FeasibilityVerdict& verdict);

/// Outcome of checking lambda p_n < mu - s_n for n = 1..N.
struct StabilityReport {
  std::size_t checked_depth = 0;
  std::size_t feasible_up_to = 0;    // largest n such that levels 1..n all hold
  std::vector<double> margins;       // lambda p_n - (mu - s_n); negative means the level holds
  std::vector<double> blocking;      // p_1..p_N used for the margins
  double ell_estimate = 0.0;         // ell_N
  std::vector<double> decay_comparison;  // mu_n / ell_N^n
  FeasibilityVerdict verdict;
  std::string note;                  // reason for an inconclusive verdict
};

/// Checks the per-level feasibility condition down to depth N. Numeric failures while evaluating
/// the chain produce an Inconclusive verdict rather than an exception.
StabilityReport is_feasible(OverflowChain& chain, std::size_t depth);

/// Largest admissible first rate: the positive root of m = mu - lambda L_0(m).
/// Throws DomainError when lambda >= mu.
double max_first_rate(const ArrivalModel& model, double capacity);

struct FeasibleConstruction {
  Allocation allocation;
  std::vector<double> bounds;  // m_1..m_N
  std::vector<double> root_residuals;
};

/// Non-increasing, strictly feasible prefix of length N built level by level:
/// mu_{n+1} = alpha * min(m_{n+1}, mu_n), where m_{n+1} solves
/// m = mu - s_n - lambda p_n L_n(m).
FeasibleConstruction feasible_construction(const ArrivalModel& model, double capacity, double alpha,
                                           std::size_t length);

enum class DelayVerdict { Plausible, Implausible, Inconclusive };

std::string to_string(DelayVerdict verdict);

/// Heuristic evidence on whether sum_n ell^n / mu_n stays finite, using ell_M as the estimate of
/// the limit. The verdict compares the tail decay ratio of the rates with ell_M; the conditions
/// concern limits, so this never settles the question.
struct FiniteDelayReport {
  double ell_estimate = 0.0;
  std::optional<double> tail_ratio;
  std::vector<double> partial_sums;  // sum_{i<=n} ell^i / mu_i, prefix then tail model
  DelayVerdict verdict = DelayVerdict::Inconclusive;
};

FiniteDelayReport finite_delay_diagnostics(OverflowChain& chain, std::size_t depth,
                                           std::size_t tail_terms = 64);

}  // namespace ordcap
