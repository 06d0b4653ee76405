#include "ordcap/stability.hpp"

#include <algorithm>
#include <cmath>

#include "ordcap/errors.hpp"
#include "ordcap/metrics.hpp"
#include "ordcap/scalar.hpp"

namespace ordcap {

std::string to_string(const FeasibilityVerdict& verdict) {
  switch (verdict.kind) {
    case FeasibilityVerdict::Kind::Feasible:
      return "feasible";
    case FeasibilityVerdict::Kind::Infeasible:
      return "infeasible(" + std::to_string(verdict.level) + ")";
    case FeasibilityVerdict::Kind::Inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

std::string to_string(DelayVerdict verdict) {
  switch (verdict) {
    case DelayVerdict::Plausible:
      return "fd-plausible";
    case DelayVerdict::Implausible:
      return "fd-implausible";
    case DelayVerdict::Inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

StabilityReport is_feasible(OverflowChain& chain, std::size_t depth) {
  StabilityReport report;
  report.checked_depth = depth;
  if (depth == 0) {
    report.verdict = FeasibilityVerdict::inconclusive();
    report.note = "nothing to check at depth 0";
    return report;
  }
  const Allocation& allocation = chain.allocation();
  const double lambda = chain.model().rate();
  try {
    report.blocking = blocking_probabilities(chain, depth);
    report.ell_estimate = chain.ell(depth);
  } catch (const NumericError& e) {
    report.verdict = FeasibilityVerdict::inconclusive();
    report.note = e.what();
    return report;
  }

  double used = 0.0;
  std::optional<std::size_t> first_violation;
  for (std::size_t n = 1; n <= depth; ++n) {
    used += allocation.rate(n);
    const double margin = lambda * report.blocking[n - 1] - (allocation.capacity() - used);
    report.margins.push_back(margin);
    if (margin >= 0.0 && !first_violation) first_violation = n;
    report.decay_comparison.push_back(allocation.rate(n) /
                                      std::pow(report.ell_estimate, static_cast<double>(n)));
  }
  if (first_violation) {
    report.verdict = FeasibilityVerdict::infeasible(*first_violation);
    report.feasible_up_to = *first_violation - 1;
  } else {
    report.verdict = FeasibilityVerdict::feasible();
    report.feasible_up_to = depth;
  }
  return report;
}

double max_first_rate(const ArrivalModel& model, double capacity) {
  const double lambda = model.rate();
  if (!(lambda < capacity)) {
    throw DomainError("no admissible first rate: the arrival rate must be below the capacity");
  }
  const auto excess = [&](double x) { return x - capacity + lambda * model.lst(x); };
  return bisect(excess, 0.0, capacity).root;
}

FeasibleConstruction feasible_construction(const ArrivalModel& model, double capacity, double alpha,
                                           std::size_t length) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  const double lambda = model.rate();
  if (!(lambda < capacity)) {
    throw DomainError("no feasible series: the arrival rate must be below the capacity");
  }

  std::vector<double> rates;
  std::vector<double> bounds;
  std::vector<double> residuals;
  double used = 0.0;
  double blocking = 1.0;
  for (std::size_t n = 0; n < length; ++n) {
    const double remaining = capacity - used;
    RootResult root{};
    if (n == 0) {
      const auto excess = [&](double x) { return x - remaining + lambda * model.lst(x); };
      root = bisect(excess, 0.0, remaining);
    } else {
      OverflowChain chain(model, Allocation(capacity, rates), ChainOptions{std::max<std::size_t>(n, 25), true});
      blocking = 1.0;
      for (std::size_t i = 1; i <= n; ++i) blocking *= chain.ell(i);
      const auto excess = [&](double x) { return x - remaining + lambda * blocking * chain.lst(n, x); };
      try {
        root = bisect(excess, 0.0, remaining);
      } catch (const NumericError&) {
        throw NumericError("feasible construction: no bracketed root at level " + std::to_string(n + 1) +
                           " (remaining capacity " + std::to_string(remaining) + ", lambda p_n " +
                           std::to_string(lambda * blocking) + ")");
      }
    }
    bounds.push_back(root.root);
    residuals.push_back(std::abs(root.residual));
    const double cap = rates.empty() ? root.root : std::min(root.root, rates.back());
    rates.push_back(alpha * cap);
    used += rates.back();
  }
  return {Allocation(capacity, std::move(rates)), std::move(bounds), std::move(residuals)};
}

FiniteDelayReport finite_delay_diagnostics(OverflowChain& chain, std::size_t depth, std::size_t tail_terms) {
  if (depth == 0) throw LevelError("finite delay diagnostics need at least one server");
  const Allocation& allocation = chain.allocation();
  FiniteDelayReport report;
  report.ell_estimate = chain.ell(depth);
  if (allocation.tail_ratio()) {
    report.tail_ratio = allocation.tail_ratio();
  } else if (depth >= 2) {
    report.tail_ratio = allocation.rate(depth) / allocation.rate(depth - 1);
  }

  const double ell = report.ell_estimate;
  double sum = 0.0;
  double rate = 0.0;
  for (std::size_t n = 1; n <= depth + tail_terms; ++n) {
    if (n <= depth) {
      rate = allocation.rate(n);
    } else if (report.tail_ratio) {
      rate *= *report.tail_ratio;
    } else {
      break;
    }
    sum += std::pow(ell, static_cast<double>(n)) / rate;
    report.partial_sums.push_back(sum);
  }

  constexpr double kTie = 1e-12;
  if (ell >= 1.0) {
    report.verdict = DelayVerdict::Implausible;
  } else if (!report.tail_ratio || std::abs(*report.tail_ratio - ell) <= kTie) {
    report.verdict = DelayVerdict::Inconclusive;
  } else {
    report.verdict = *report.tail_ratio > ell ? DelayVerdict::Plausible : DelayVerdict::Implausible;
  }
  return report;
}

}  // namespace ordcap
