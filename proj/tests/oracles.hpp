#pragma once
// Reference computations written directly from the defining formulas. They share no code with
// the library so disagreements point at one side or the other.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

// E[exp(-s T)] for T ~ Gamma(k, k*lambda)
inline double gamma_lst(double k, double lambda, double s) { return std::pow(k * lambda / (k * lambda + s), k); }

// Plain recursion on L_n(s) = L_{n-1}(mu_n+s) / (1 - L_{n-1}(s) + L_{n-1}(mu_n+s)), no caching.
inline double overflow_lst(double k, double lambda, const std::vector<double>& mu, std::size_t n, double s) {
  if (n == 0) return gamma_lst(k, lambda, s);
  const double here = overflow_lst(k, lambda, mu, n - 1, s);
  const double shifted = overflow_lst(k, lambda, mu, n - 1, mu[n - 1] + s);
  return shifted / (1.0 - here + shifted);
}

// p_1..p_n as products of L_{i-1}(mu_i)
inline std::vector<double> blocking(double k, double lambda, const std::vector<double>& mu, std::size_t n) {
  std::vector<double> p;
  double running = 1.0;
  for (std::size_t i = 1; i <= n; ++i) {
    running *= overflow_lst(k, lambda, mu, i - 1, mu[i - 1]);
    p.push_back(running);
  }
  return p;
}

// Erlang B blocking for n servers and offered load a, by the standard recursion.
inline double erlang_b(std::size_t n, double a) {
  double b = 1.0;
  for (std::size_t i = 1; i <= n; ++i) b = a * b / (static_cast<double>(i) + a * b);
  return b;
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Second-order one-sided difference at the boundary x.
inline double forward_difference(const std::function<double(double)>& f, double x, double h) {
  return (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h);
}

// min sum_n w_n / x_n subject to sum_n x_n = budget, x > 0, by Newton's method on the
// equality-constrained problem (diagonal Hessian, multiplier eliminated each step) with
// backtracking that keeps x positive.
inline std::vector<double> min_weighted_reciprocal(const std::vector<double>& w, double budget, int iterations = 200) {
  const std::size_t n = w.size();
  std::vector<double> x(n, budget / static_cast<double>(n));
  const auto value = [&](const std::vector<double>& y) {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += w[i] / y[i];
    return v;
  };
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> g(n), hinv(n);
    double sum_hinv = 0.0;
    double sum_hinv_g = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = -w[i] / (x[i] * x[i]);
      hinv[i] = x[i] * x[i] * x[i] / (2.0 * w[i]);
      sum_hinv += hinv[i];
      sum_hinv_g += hinv[i] * g[i];
    }
    const double nu = -sum_hinv_g / sum_hinv;  // makes sum of the step zero
    std::vector<double> step(n);
    double decrement = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      step[i] = -hinv[i] * (g[i] + nu);
      decrement += -g[i] * step[i];
    }
    if (decrement < 1e-30) break;
    double t = 1.0;
    const double current = value(x);
    std::vector<double> trial(n);
    for (;;) {
      bool positive = true;
      for (std::size_t i = 0; i < n; ++i) {
        trial[i] = x[i] + t * step[i];
        positive = positive && trial[i] > 0.0;
      }
      if (positive && value(trial) <= current - 0.25 * t * decrement) break;
      t *= 0.5;
      if (t < 1e-20) return x;
    }
    x = trial;
  }
  return x;
}

// sum_{n<=M} q_n / mu_n + p_M (1+sqrt(l)) / (mu_M sqrt(l)) with l = L_{M-1}(mu_M), or +inf when
// the geometric tail with ratio sqrt(l) does not fit in the capacity left after mu_1..mu_M.
inline double tail_approximate_delay(double k, double lambda, double capacity, const std::vector<double>& mu) {
  const std::size_t m = mu.size();
  const auto p = blocking(k, lambda, mu, m);
  double sum = 0.0;
  double previous = 1.0;
  double used = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sum += (previous - p[i]) / mu[i];
    previous = p[i];
    used += mu[i];
  }
  const double l = overflow_lst(k, lambda, mu, m - 1, mu[m - 1]);
  const double root = std::sqrt(l);
  const double tail_mass = mu[m - 1] * root / (1.0 - root);
  if (used + tail_mass > capacity) return std::numeric_limits<double>::infinity();
  return sum + p[m - 1] * (1.0 + root) / (mu[m - 1] * root);
}

}  // namespace oracle
