#include "ordcap/metrics.hpp"

#include <cmath>
#include <string>

#include "ordcap/errors.hpp"

namespace ordcap {

std::vector<double> blocking_probabilities(OverflowChain& chain, std::size_t depth) {
  std::vector<double> p;
  p.reserve(depth);
  double previous = 1.0;
  for (std::size_t n = 1; n <= depth; ++n) {
    previous *= chain.ell(n);
    p.push_back(previous);
  }
  return p;
}

std::vector<double> fastest_idle_distribution(std::span<const double> blocking) {
  std::vector<double> q;
  q.reserve(blocking.size());
  double previous = 1.0;
  for (std::size_t i = 0; i < blocking.size(); ++i) {
    const double current = blocking[i];
    if (!(current < previous) || !(current > 0.0)) {
      throw InvariantError("blocking probabilities must be strictly decreasing in (0,1); violated at n=" +
                           std::to_string(i + 1));
    }
    q.push_back(previous - current);
    previous = current;
  }
  return q;
}

EllSeries ell_series(OverflowChain& chain, std::size_t depth) {
  const Allocation& allocation = chain.allocation();
  EllSeries series;
  series.ell.reserve(depth);
  series.ell_lower.reserve(depth);
  double used = 0.0;
  for (std::size_t n = 1; n <= depth; ++n) {
    const double remaining = allocation.capacity() - used;
    if (!(remaining > 0.0)) {
      throw CapacityError("servers 1.." + std::to_string(n - 1) + " exhaust the capacity");
    }
    series.ell.push_back(chain.ell(n));
    series.ell_lower.push_back(chain.lst(n - 1, remaining));
    used += allocation.rate(n);
  }
  return series;
}

std::vector<double> effective_utilization(double arrival_rate, const Allocation& allocation,
                                          std::span<const double> blocking) {
  std::vector<double> rho;
  rho.reserve(blocking.size() + 1);
  rho.push_back(arrival_rate / allocation.capacity());
  double used = 0.0;
  for (std::size_t n = 1; n <= blocking.size(); ++n) {
    used += allocation.rate(n);
    const double remaining = allocation.capacity() - used;
    if (!(remaining > 0.0)) {
      throw CapacityError("no capacity remains after server " + std::to_string(n));
    }
    rho.push_back(arrival_rate * blocking[n - 1] / remaining);
  }
  return rho;
}

Extended residual_tail(double p_last, double rate_last, double ell_last) {
  if (!(rate_last > 0.0)) throw DomainError("residual needs a positive last rate");
  if (!(p_last >= 0.0)) throw DomainError("blocking probability must be nonnegative");
  if (ell_last >= 1.0) return Extended::infinite();
  if (p_last == 0.0) return Extended(0.0);
  if (!(ell_last > 0.0)) throw DomainError("ell_M must be positive");
  const double root = std::sqrt(ell_last);
  return Extended(p_last * (1.0 + root) / (rate_last * root));
}

namespace {

DelayBreakdown delay_from(std::span<const double> rates, std::span<const double> p,
                          std::span<const double> q, double ell_last) {
  DelayBreakdown delay;
  for (std::size_t i = 0; i < q.size(); ++i) delay.truncated += q[i] / rates[i];
  if (q.empty()) {
    delay.residual = Extended::infinite();
  } else {
    delay.residual = residual_tail(p.back(), rates.back(), ell_last);
  }
  delay.total = delay.residual + delay.truncated;
  return delay;
}

std::vector<double> leading_rates(const Allocation& allocation, std::size_t depth) {
  std::vector<double> rates;
  rates.reserve(depth);
  for (std::size_t n = 1; n <= depth; ++n) rates.push_back(allocation.rate(n));
  return rates;
}

}  // namespace

DelayBreakdown expected_delay(OverflowChain& chain, std::size_t depth) {
  if (depth == 0) throw LevelError("expected delay needs at least one server");
  const auto p = blocking_probabilities(chain, depth);
  const auto q = fastest_idle_distribution(p);
  const auto rates = leading_rates(chain.allocation(), depth);
  return delay_from(rates, p, q, chain.ell(depth));
}

SystemMetrics compute_metrics(OverflowChain& chain, std::size_t depth) {
  if (depth == 0) throw LevelError("metrics need at least one server");
  SystemMetrics metrics;
  metrics.depth = depth;
  metrics.rates = leading_rates(chain.allocation(), depth);

  const auto p = blocking_probabilities(chain, depth);
  metrics.q = fastest_idle_distribution(p);
  auto series = ell_series(chain, depth);
  metrics.ell = std::move(series.ell);
  metrics.ell_lower = std::move(series.ell_lower);
  metrics.rho_eff = effective_utilization(chain.model().rate(), chain.allocation(), p);

  metrics.p.reserve(depth + 1);
  metrics.p.push_back(1.0);
  metrics.p.insert(metrics.p.end(), p.begin(), p.end());

  const auto delay = delay_from(metrics.rates, p, metrics.q, metrics.ell.back());
  metrics.delay_truncated = delay.truncated;
  metrics.residual = delay.residual;
  metrics.delay_total = delay.total;
  return metrics;
}

double conditional_busy_probability(OverflowChain& chain, std::size_t n) { return chain.ell(n); }

}  // namespace ordcap
