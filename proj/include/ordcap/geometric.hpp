#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ordcap/allocation.hpp"
#include "ordcap/arrival.hpp"

namespace ordcap {

/// mu_n = mu * alpha * (1-alpha)^(n-1): prefix of length M plus a geometric tail with ratio
/// 1-alpha, so the whole series sums to mu and mu(1-alpha)^n remains after n servers.
Allocation geometric_allocation(double alpha, double capacity, std::size_t length);

/// ell_n(alpha) = L_{n-1}(mu_n) under geometric_allocation(alpha, capacity, n), one value per alpha.
std::vector<double> ell_alpha_curve(const ArrivalModel& model, double capacity,
                                    std::span<const double> alphas, std::size_t level);

/// Crossing point of ell_1(alpha) and ell_2(alpha), located by bisection on (0.01, 0.99).
double ell_crossing_alpha(const ArrivalModel& model, double capacity, double tolerance = 1e-8);

/// Minimizer of the tail approximation program for a constant blocking ratio ell:
/// mu_n = mu (1 - sqrt(ell)) ell^((n-1)/2), with a geometric tail of ratio sqrt(ell).
Allocation tap_solution(double ell, double capacity, std::size_t length);

/// (1-ell)/ell * sum_n ell^n / mu_n over the given rates.
double tap_objective(double ell, std::span<const double> rates);

/// Closed-form value of the untruncated objective at tap_solution: (1+sqrt(ell)) / ((1-sqrt(ell)) mu).
double tap_optimal_value(double ell, double capacity);

/// Geometric allocation with alpha = 1 - sqrt(rho). Poisson arrivals only.
Allocation sqrt_rho_heuristic(const ArrivalModel& model, double capacity, std::size_t length);

}  // namespace ordcap
