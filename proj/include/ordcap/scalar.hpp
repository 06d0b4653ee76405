#pragma once

#include <cmath>
#include <functional>

namespace ordcap {

struct RootResult {
  double root;
  double residual;
  int iterations;
};

/// Bisection for f(lo) < 0 < f(hi). Throws NumericError when the bracket does not straddle a
/// sign change. Stops when the bracket is below `tolerance` or after `max_iterations` halvings.
RootResult bisect(const std::function<double(double)>& f, double lo, double hi,
                  double tolerance = 0.0, int max_iterations = 200);

struct MinimizeResult {
  double argmin;
  double value;
  int evaluations;
};

/// Golden-section search for the minimum of a unimodal f on [lo, hi]. Stops once the bracket is
/// narrower than `tolerance`. The returned point is the best one evaluated.
MinimizeResult golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                       double tolerance, int max_iterations = 200);

}  // namespace ordcap
