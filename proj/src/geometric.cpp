#include "ordcap/geometric.hpp"

#include <cmath>

#include "ordcap/errors.hpp"
#include "ordcap/overflow_chain.hpp"
#include "ordcap/scalar.hpp"

namespace ordcap {

namespace {

Allocation geometric_series(double first_share, double ratio, double capacity, std::size_t length) {
  if (length == 0) throw DomainError("a geometric allocation needs at least one server");
  std::vector<double> rates;
  rates.reserve(length);
  double rate = capacity * first_share;
  for (std::size_t n = 0; n < length; ++n) {
    rates.push_back(rate);
    rate *= ratio;
  }
  return Allocation(capacity, std::move(rates), ratio);
}

}  // namespace

Allocation geometric_allocation(double alpha, double capacity, std::size_t length) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  return geometric_series(alpha, 1.0 - alpha, capacity, length);
}

std::vector<double> ell_alpha_curve(const ArrivalModel& model, double capacity,
                                    std::span<const double> alphas, std::size_t level) {
  if (level == 0) throw LevelError("ell_n(alpha) is defined for n >= 1");
  std::vector<double> values;
  values.reserve(alphas.size());
  for (const double alpha : alphas) {
    OverflowChain chain(model, geometric_allocation(alpha, capacity, level));
    values.push_back(chain.ell(level));
  }
  return values;
}

double ell_crossing_alpha(const ArrivalModel& model, double capacity, double tolerance) {
  const auto gap = [&](double alpha) {
    OverflowChain chain(model, geometric_allocation(alpha, capacity, 2));
    return chain.ell(2) - chain.ell(1);
  };
  // ell_2 - ell_1 is negative for small alpha and positive near 1
  return bisect(gap, 0.01, 0.99, tolerance).root;
}

Allocation tap_solution(double ell, double capacity, std::size_t length) {
  if (!(ell > 0.0 && ell < 1.0)) throw DomainError("ell must lie in (0,1)");
  const double root = std::sqrt(ell);
  return geometric_series(1.0 - root, root, capacity, length);
}

double tap_objective(double ell, std::span<const double> rates) {
  double sum = 0.0;
  double power = 1.0;
  for (const double rate : rates) {
    power *= ell;
    sum += power / rate;
  }
  return (1.0 - ell) / ell * sum;
}

double tap_optimal_value(double ell, double capacity) {
  if (!(ell > 0.0 && ell < 1.0)) throw DomainError("ell must lie in (0,1)");
  const double root = std::sqrt(ell);
  return (1.0 + root) / ((1.0 - root) * capacity);
}

Allocation sqrt_rho_heuristic(const ArrivalModel& model, double capacity, std::size_t length) {
  if (!model.is_poisson()) throw DomainError("the sqrt(rho) heuristic is stated for Poisson arrivals only");
  const double rho = model.rate() / capacity;
  if (!(rho < 1.0)) throw DomainError("the sqrt(rho) heuristic needs rho < 1");
  return geometric_allocation(1.0 - std::sqrt(rho), capacity, length);
}

}  // namespace ordcap
