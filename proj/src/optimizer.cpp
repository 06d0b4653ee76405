#include "ordcap/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "ordcap/errors.hpp"
#include "ordcap/geometric.hpp"
#include "ordcap/log.hpp"
#include "ordcap/scalar.hpp"

namespace ordcap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative accuracy of numerically summed tail residuals.
constexpr double kTailRelTol = 1e-12;
constexpr std::size_t kMaxTailTerms = 10'000'000;

// Coordinates stay this fraction of the capacity away from 0 and from the remaining capacity.
constexpr double kBoundaryGuard = 1e-9;

}  // namespace

Objective::Objective(Kind kind, double tau, std::function<double(double)> cost, std::string name)
    : kind_(kind), tau_(tau), cost_(std::move(cost)), name_(std::move(name)) {}

Objective Objective::delay() {
  return Objective(Kind::Delay, 0.0, [](double rate) { return 1.0 / rate; }, "delay");
}

Objective Objective::deadline(double tau) {
  if (!(tau >= 0.0)) throw DomainError("deadline tau must be nonnegative");
  return Objective(Kind::Deadline, tau, [tau](double rate) { return std::exp(-rate * tau); }, "deadline");
}

Objective Objective::custom(std::function<double(double)> cost, std::string name) {
  if (!cost) throw DomainError("custom objective needs a cost function");
  return Objective(Kind::Custom, 0.0, std::move(cost), std::move(name));
}

double Objective::cost(double rate) const { return cost_(rate); }

Extended Objective::tail(double p_last, double rate_last, double ell_last) const {
  if (kind_ == Kind::Delay) return residual_tail(p_last, rate_last, ell_last);
  if (!(rate_last > 0.0)) throw DomainError("tail needs a positive last rate");
  if (ell_last >= 1.0) return Extended::infinite();
  if (p_last == 0.0) return Extended(0.0);

  const double root = std::sqrt(ell_last);
  double weight = p_last * (1.0 - ell_last);  // q_{M+j} = p_M (1-ell) ell^(j-1)
  double rate = rate_last;
  double sum = 0.0;
  double previous_term = kInf;
  for (std::size_t j = 1; j <= kMaxTailTerms; ++j) {
    rate *= root;
    const double term = weight * cost_(rate);
    if (!std::isfinite(term)) return Extended::infinite();
    sum += term;
    if (term == 0.0) return Extended(sum);
    const double ratio = term / previous_term;
    if (j > 1 && ratio < 1.0 && term * ratio / (1.0 - ratio) <= kTailRelTol * sum) return Extended(sum);
    previous_term = term;
    weight *= ell_last;
  }
  return Extended::infinite();
}

Extended objective_value(OverflowChain& chain, std::size_t depth, const Objective& objective) {
  if (objective.kind() == Objective::Kind::Delay) return expected_delay(chain, depth).total;
  if (depth == 0) throw LevelError("objective needs at least one server");
  const auto p = blocking_probabilities(chain, depth);
  const auto q = fastest_idle_distribution(p);
  double sum = 0.0;
  for (std::size_t n = 1; n <= depth; ++n) sum += q[n - 1] * objective.cost(chain.allocation().rate(n));
  return objective.tail(p.back(), chain.allocation().rate(depth), chain.ell(depth)) + sum;
}

namespace {

// mean_gap is E T_{M-1}, the mean time between arrivals reaching the last server.
PinnedRate pin_last_rate(OverflowChain& chain, std::size_t level, double remaining, double mean_gap,
                         double tolerance) {
  // g(x) = (1 - sqrt(L(x))) R is increasing and concave with g(0) = 0, so a positive fixed point
  // exists iff g'(0) = R E[T_{M-1}] / 2 exceeds one.
  if (!(remaining * mean_gap > 2.0)) {
    throw NumericError("no positive pinned rate: remaining capacity too small for the overflow stream");
  }
  const auto pinned = [&](const LstPoint& at) {
    const double root = std::sqrt(at.value);
    return (1.0 - at.value) / (1.0 + root) * remaining;
  };

  double lo = 0.0;
  double hi = remaining;
  double x = pinned(chain.evaluate(level, remaining));
  for (int iteration = 1; iteration <= 200; ++iteration) {
    const LstPoint at = chain.evaluate(level, x);
    const double gx = pinned(at);
    const double h = x - gx;
    if (std::abs(h) <= tolerance * remaining) return {x, h, iteration, at.value};
    if (h > 0.0) {
      hi = std::min(hi, x);
    } else {
      lo = std::max(lo, x);
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return {x, h, iteration, at.value};

    const double slope = 1.0 + remaining * at.derivative / (2.0 * std::sqrt(at.value));
    double next = slope > 0.0 ? x - h / slope : gx;
    if (!(next > lo && next < hi)) next = gx;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  throw NumericError("pinned rate iteration did not converge");
}

}  // namespace

PinnedRate tail_pinned_rate(OverflowChain& prefix_chain, double tolerance) {
  const Allocation& allocation = prefix_chain.allocation();
  if (allocation.has_tail()) throw DomainError("the pinned rate is solved on a prefix without tail");
  const std::size_t level = allocation.prefix_size();  // M - 1
  const double remaining = allocation.remaining(level);
  if (!(remaining > 0.0)) throw CapacityError("no capacity remains for the last server");
  return pin_last_rate(prefix_chain, level, remaining, -prefix_chain.lst_derivative(level, 0.0), tolerance);
}

double pinned_objective(const ArrivalModel& model, double capacity, std::span<const double> prefix,
                        const Objective& objective, std::size_t max_level) {
  try {
    std::vector<double> rates(prefix.begin(), prefix.end());
    OverflowChain chain(model, Allocation::allow_unordered(capacity, rates), ChainOptions{max_level, false});
    const std::size_t level = rates.size();  // M - 1
    const double remaining = chain.allocation().remaining(level);
    if (!(remaining > 0.0)) return kInf;

    std::vector<double> p = blocking_probabilities(chain, level);
    const double p_before = level == 0 ? 1.0 : p.back();
    const PinnedRate last = pin_last_rate(chain, level, remaining, 1.0 / (model.rate() * p_before), 1e-13);
    rates.push_back(last.rate);
    p.push_back(p_before * last.ell);

    const auto q = fastest_idle_distribution(p);
    if (objective.kind() == Objective::Kind::Delay) {
      double truncated = 0.0;
      for (std::size_t n = 0; n < rates.size(); ++n) truncated += q[n] / rates[n];
      return (residual_tail(p.back(), last.rate, last.ell) + truncated).value();
    }
    double sum = 0.0;
    for (std::size_t n = 0; n < rates.size(); ++n) sum += q[n] * objective.cost(rates[n]);
    return (objective.tail(p.back(), last.rate, last.ell) + sum).value();
  } catch (const Error&) {
    return kInf;
  }
}

Allocation complete_allocation(const ArrivalModel& model, double capacity, std::span<const double> prefix,
                               std::size_t max_level) {
  std::vector<double> rates(prefix.begin(), prefix.end());
  OverflowChain chain(model, Allocation::allow_unordered(capacity, rates), ChainOptions{max_level, true});
  const std::size_t level = rates.size();
  const double remaining = chain.allocation().remaining(level);
  if (!(remaining > 0.0)) throw CapacityError("no capacity remains for the last server");
  const double mean_gap = level == 0 ? model.mean() : chain.mean_overflow_time(level);
  const PinnedRate last = pin_last_rate(chain, level, remaining, mean_gap, 1e-13);
  rates.push_back(last.rate);
  return Allocation::allow_unordered(capacity, std::move(rates), std::sqrt(last.ell));
}

std::vector<double> initial_prefix(const ArrivalModel& model, double capacity, std::size_t horizon,
                                   const Objective& objective, std::size_t max_level) {
  if (horizon < 1) throw DomainError("horizon must be at least 1");
  const auto prefix_of = [&](double alpha) {
    const Allocation start = geometric_allocation(alpha, capacity, horizon);
    return std::vector<double>(start.prefix().begin(),
                               start.prefix().begin() + static_cast<std::ptrdiff_t>(horizon - 1));
  };
  // alpha = 1 - sqrt(rho) for Poisson arrivals; ell_1 at alpha = 1/2 otherwise
  double best_alpha = model.is_poisson() ? 1.0 - std::sqrt(model.rate() / capacity)
                                         : 1.0 - std::sqrt(model.lst(0.5 * capacity));
  double best = pinned_objective(model, capacity, prefix_of(best_alpha), objective, max_level);
  constexpr int kScan = 49;
  for (int i = 1; i <= kScan; ++i) {
    const double alpha = static_cast<double>(i) / (kScan + 1);
    const double value = pinned_objective(model, capacity, prefix_of(alpha), objective, max_level);
    if (value < best) {
      best = value;
      best_alpha = alpha;
    }
  }
  return prefix_of(best_alpha);
}

namespace {

// Largest t (capped) keeping prefix + t d positive and within capacity.
double pattern_reach(const std::vector<double>& prefix, const std::vector<double>& direction, double capacity,
                     double guard) {
  constexpr double kMaxStretch = 64.0;
  double reach = kMaxStretch;
  double total = 0.0;
  double slope = 0.0;
  for (std::size_t n = 0; n < prefix.size(); ++n) {
    if (direction[n] < 0.0) reach = std::min(reach, (prefix[n] - guard) / -direction[n]);
    total += prefix[n];
    slope += direction[n];
  }
  if (slope > 0.0) reach = std::min(reach, (capacity - guard - total) / slope);
  return std::max(reach, 0.0);
}

StartRecord descend(const ArrivalModel& model, double capacity, std::vector<double> prefix,
                    const OptimizerConfig& config) {
  StartRecord record;
  record.initial_prefix = prefix;
  const auto evaluate = [&](std::span<const double> rates) {
    return pinned_objective(model, capacity, rates, config.objective, config.max_level);
  };

  double current = evaluate(prefix);
  record.trace.push_back(current);
  const double guard = kBoundaryGuard * capacity;
  std::vector<double> probe;
  for (std::size_t sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    const double before = current;
    const std::vector<double> sweep_start = prefix;
    for (std::size_t n = 0; n < prefix.size(); ++n) {
      const double others = std::accumulate(prefix.begin(), prefix.end(), 0.0) - prefix[n];
      const double lo = guard;
      const double hi = capacity - others - guard;
      if (!(hi > lo)) continue;
      probe = prefix;
      const auto along = [&](double rate) {
        probe[n] = rate;
        return evaluate(probe);
      };
      const MinimizeResult best = golden_section_minimize(along, lo, hi, config.tol_rate);
      if (best.value < current) {
        prefix[n] = best.argmin;
        current = best.value;
      }
    }
    if (config.pattern_moves && current < before && std::isfinite(before)) {
      // extrapolate along the sweep's net displacement; accepted only if it improves
      std::vector<double> direction(prefix.size());
      for (std::size_t n = 0; n < prefix.size(); ++n) direction[n] = prefix[n] - sweep_start[n];
      const double t_max = pattern_reach(prefix, direction, capacity, guard);
      if (t_max > 0.0) {
        const auto along = [&](double t) {
          for (std::size_t n = 0; n < prefix.size(); ++n) probe[n] = prefix[n] + t * direction[n];
          return evaluate(probe);
        };
        probe = prefix;
        const MinimizeResult best = golden_section_minimize(along, 0.0, t_max, 1e-4 * t_max);
        if (best.value < current) {
          for (std::size_t n = 0; n < prefix.size(); ++n) prefix[n] += best.argmin * direction[n];
          current = best.value;
        }
      }
    }
    record.trace.push_back(current);
    record.sweeps = sweep;
    log_debug("sweep " + std::to_string(sweep) + " objective " + std::to_string(current));
    if (!(before - current > config.tol_obj * std::abs(before))) break;
  }
  record.final_prefix = std::move(prefix);
  record.objective = std::isfinite(current) ? Extended(current) : Extended::infinite();
  return record;
}

}  // namespace

OptimizationResult optimize_allocation(const ArrivalModel& model, double capacity, const OptimizerConfig& config) {
  if (!(model.rate() < capacity)) throw DomainError("optimization needs lambda < mu");
  if (config.horizon < 1 || config.horizon > config.max_level) {
    throw DomainError("horizon must lie in [1, max_level]");
  }
  if (!(config.tol_rate > 0.0) || !(config.tol_obj > 0.0)) throw DomainError("tolerances must be positive");

  const std::vector<double> base =
      initial_prefix(model, capacity, config.horizon, config.objective, config.max_level);
  std::vector<std::vector<double>> starts{base};
  for (std::size_t r = 1; r <= config.restarts && !base.empty(); ++r) {
    std::mt19937_64 rng(config.seed + r);
    std::normal_distribution<double> jitter(0.0, 0.25);
    std::vector<double> perturbed = base;
    for (double& rate : perturbed) rate *= std::exp(jitter(rng));
    std::sort(perturbed.begin(), perturbed.end(), std::greater<>());
    const double scale = std::accumulate(base.begin(), base.end(), 0.0) /
                         std::accumulate(perturbed.begin(), perturbed.end(), 0.0);
    for (double& rate : perturbed) rate *= scale;
    starts.push_back(std::move(perturbed));
  }

  std::vector<StartRecord> records(starts.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < starts.size(); i = next++) {
      records[i] = descend(model, capacity, starts[i], config);
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(config.workers, 1, starts.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].objective < records[best].objective) best = i;
  }
  if (records[best].objective.is_infinite()) {
    throw NumericError("optimizer found no probe with a finite objective");
  }

  const StartRecord& winner = records[best];
  Allocation allocation = complete_allocation(model, capacity, winner.final_prefix, config.max_level);
  OverflowChain chain(model, allocation, ChainOptions{config.max_level, true});
  const std::size_t depth = config.horizon;
  SystemMetrics metrics = compute_metrics(chain, depth);
  const Extended residual = config.objective.tail(metrics.p.back(), metrics.rates.back(), metrics.ell.back());
  const Extended value = objective_value(chain, depth, config.objective);
  return OptimizationResult{std::move(allocation), value,          residual, winner.sweeps, winner.trace,
                            std::move(records),    std::move(metrics)};
}

}  // namespace ordcap
