#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ordcap/allocation.hpp"
#include "ordcap/arrival.hpp"
#include "ordcap/extended.hpp"
#include "ordcap/metrics.hpp"
#include "ordcap/overflow_chain.hpp"

namespace ordcap {

/// Per-server cost g(mu) weighted by q_n in the objective sum_n q_n g(mu_n).
///
/// Delay uses g(mu) = 1/mu and a closed-form tail residual; Deadline(tau) uses
/// g(mu) = exp(-mu tau), the probability that service exceeds tau. Custom costs should be convex
/// in the rate; their tail residual is summed numerically.
class Objective {
 public:
  enum class Kind { Delay, Deadline, Custom };

  static Objective delay();
  static Objective deadline(double tau);
  static Objective custom(std::function<double(double)> cost, std::string name = "custom");

  Kind kind() const { return kind_; }
  double tau() const { return tau_; }
  const std::string& name() const { return name_; }

  double cost(double rate) const;

  /// sum_{j>=1} p_M (1-ell) ell^(j-1) g(mu_M ell^(j/2)): the tail of servers beyond M under a
  /// geometric continuation with ratio sqrt(ell_M).
  Extended tail(double p_last, double rate_last, double ell_last) const;

 private:
  Objective(Kind kind, double tau, std::function<double(double)> cost, std::string name);

  Kind kind_;
  double tau_ = 0.0;
  std::function<double(double)> cost_;
  std::string name_;
};

struct OptimizerConfig {
  std::size_t horizon = 15;       // M
  double tol_rate = 1e-6;         // golden-section bracket width
  double tol_obj = 1e-8;          // relative sweep improvement that stops the descent
  std::size_t max_sweeps = 50;
  std::size_t restarts = 3;       // perturbed starts on top of the unperturbed one
  std::uint64_t seed = 1;
  std::size_t workers = 1;        // starts evaluated concurrently
  std::size_t max_level = 25;
  bool pattern_moves = true;      // extrapolation step along each sweep's displacement
  Objective objective = Objective::delay();
};

struct PinnedRate {
  double rate;
  double residual;
  int iterations;
  double ell;  // L_{M-1}(rate)
};

/// mu_M solving mu_M = (1 - sqrt(L_{M-1}(mu_M))) (mu - s_{M-1}), where the chain's allocation
/// holds mu_1..mu_{M-1}. Safeguarded Newton on the fixed-point equation with a fixed-point
/// fallback. Throws CapacityError when nothing remains and NumericError when no positive
/// solution exists or the iteration stalls. `tolerance` is relative to mu - s_{M-1}.
PinnedRate tail_pinned_rate(OverflowChain& prefix_chain, double tolerance = 1e-13);

/// sum_{n<=M} q_n g(mu_n) + tail for the first M rates of the chain's allocation.
Extended objective_value(OverflowChain& chain, std::size_t depth, const Objective& objective);

struct StartRecord {
  std::vector<double> initial_prefix;  // mu_1..mu_{M-1}
  std::vector<double> final_prefix;
  Extended objective;
  std::size_t sweeps = 0;
  std::vector<double> trace;
};

struct OptimizationResult {
  Allocation allocation;  // mu_1..mu_M with a sqrt(ell_M) geometric tail
  Extended objective_value;
  Extended residual;
  std::size_t sweeps = 0;
  std::vector<double> trace;  // objective after each sweep of the winning start (entry 0 = start)
  std::vector<StartRecord> starts;
  SystemMetrics metrics;
};

/// Minimizes the truncated objective plus tail residual over mu_1..mu_{M-1} by cyclic coordinate
/// descent, each coordinate searched by golden section over its admissible interval and mu_M
/// re-pinned after every move. Requires lambda < mu.
OptimizationResult optimize_allocation(const ArrivalModel& model, double capacity,
                                       const OptimizerConfig& config = {});

/// Starting prefix mu_1..mu_{M-1} used by optimize_allocation before perturbation: the best
/// geometric series among alpha = 1 - sqrt(rho) (Poisson) and a grid of 49 alphas in (0, 1).
std::vector<double> initial_prefix(const ArrivalModel& model, double capacity, std::size_t horizon,
                                   const Objective& objective = Objective::delay(), std::size_t max_level = 25);

/// Objective of the prefix mu_1..mu_{M-1} with mu_M pinned; +inf when the probe is unusable.
double pinned_objective(const ArrivalModel& model, double capacity, std::span<const double> prefix,
                        const Objective& objective, std::size_t max_level = 25);

/// The prefix completed with its pinned mu_M and sqrt(ell_M) tail.
Allocation complete_allocation(const ArrivalModel& model, double capacity, std::span<const double> prefix,
                               std::size_t max_level = 25);

}  // namespace ordcap
