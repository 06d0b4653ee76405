#include "ordcap/scalar.hpp"

#include "ordcap/errors.hpp"

namespace ordcap {

RootResult bisect(const std::function<double(double)>& f, double lo, double hi, double tolerance,
                  int max_iterations) {
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) return {lo, 0.0, 0};
  if (f_hi == 0.0) return {hi, 0.0, 0};
  if (!(f_lo < 0.0 && f_hi > 0.0)) {
    throw NumericError("bisection bracket does not straddle a root");
  }
  RootResult result{0.5 * (lo + hi), 0.0, 0};
  for (int i = 0; i < max_iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    // the bracket cannot shrink further in double precision
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(mid);
    result = {mid, f_mid, i + 1};
    if (f_mid == 0.0 || hi - lo <= tolerance) break;
    if (f_mid < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return result;
}

MinimizeResult golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                       double tolerance, int max_iterations) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int evaluations = 2;
  for (int i = 0; i < max_iterations && (b - a) > tolerance; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evaluations;
  }
  if (fc <= fd) return {c, fc, evaluations};
  return {d, fd, evaluations};
}

}  // namespace ordcap
