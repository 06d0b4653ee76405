#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ordcap/allocation.hpp"
#include "ordcap/extended.hpp"
#include "ordcap/overflow_chain.hpp"

namespace ordcap {

/// Arrival-epoch performance of the first M servers of an allocation.
///
/// Index conventions: p and rho_eff carry the n = 0 entry (p[0] = 1, rho_eff[0] = lambda/mu);
/// q, ell and ell_lower start at n = 1 (q[0] is q_1).
struct SystemMetrics {
  std::size_t depth = 0;
  std::vector<double> rates;      // mu_1..mu_M
  std::vector<double> p;          // p_0..p_M
  std::vector<double> q;          // q_1..q_M
  std::vector<double> ell;        // ell_1..ell_M
  std::vector<double> ell_lower;  // lower bounds L_{n-1}(mu - s_{n-1})
  std::vector<double> rho_eff;    // rho_0..rho_M
  double delay_truncated = 0.0;
  Extended residual;
  Extended delay_total;
};

struct DelayBreakdown {
  double truncated = 0.0;
  Extended residual;
  Extended total;
};

struct EllSeries {
  std::vector<double> ell;
  std::vector<double> ell_lower;
};

/// p_1..p_M through p_n = L_{n-1}(mu_n) p_{n-1}. M = 0 yields an empty list (p_0 = 1 is implied).
std::vector<double> blocking_probabilities(OverflowChain& chain, std::size_t depth);

/// q_n = p_{n-1} - p_n for the list p_1..p_M (p_0 = 1 prepended). Throws InvariantError unless p
/// is strictly decreasing inside (0, 1).
std::vector<double> fastest_idle_distribution(std::span<const double> blocking);

/// ell_n = L_{n-1}(mu_n) together with its lower bound L_{n-1}(mu - s_{n-1}).
EllSeries ell_series(OverflowChain& chain, std::size_t depth);

/// rho_n = lambda p_n / (mu - s_n) for n = 0..M, where p is the list p_1..p_M.
std::vector<double> effective_utilization(double arrival_rate, const Allocation& allocation,
                                          std::span<const double> blocking);

/// Delay contributed by servers beyond M under a geometric tail with ratio sqrt(ell_M):
/// p_M (1 + sqrt(ell_M)) / (mu_M sqrt(ell_M)). Infinite when ell_M >= 1.
Extended residual_tail(double p_last, double rate_last, double ell_last);

/// sum_{n<=M} q_n / mu_n plus the tail residual.
DelayBreakdown expected_delay(OverflowChain& chain, std::size_t depth);

/// Everything above in one pass.
SystemMetrics compute_metrics(OverflowChain& chain, std::size_t depth);

/// P(X_n = 1 | Y >= n): the fraction of arrivals reaching server n that find it busy. Equals ell_n.
double conditional_busy_probability(OverflowChain& chain, std::size_t n);

}  // namespace ordcap
