#include <cmath>

#include "oracles.hpp"
#include "ordcap/errors.hpp"
#include "ordcap/geometric.hpp"
#include "ordcap/scalar.hpp"
#include "test_main.hpp"

using namespace ordcap;

TEST_CASE("geometric allocation") {
  const Allocation a = geometric_allocation(0.5, 1.0, 10);
  CHECK(a.rate(1) == 0.5);
  CHECK(a.rate(2) == 0.25);
  CHECK(a.rate(3) == 0.125);
  CHECK(a.partial_sum(10) + a.tail_mass() == approx(1.0).epsilon(1e-15));
  const Allocation b = geometric_allocation(0.3, 2.0, 12);
  for (std::size_t n = 1; n <= 12; ++n) CHECK(b.remaining(n) == approx(2.0 * std::pow(0.7, n)).epsilon(1e-12));
  CHECK_THROWS_AS(geometric_allocation(1.0, 1.0, 3), DomainError);
}

TEST_CASE("ell curves") {
  const ArrivalModel model = ArrivalModel::poisson(0.2);
  const std::vector<double> alphas{0.1, 0.4, 0.8, 1e-9};
  const auto ell1 = ell_alpha_curve(model, 1.0, alphas, 1);
  for (std::size_t i = 0; i < 3; ++i) CHECK(ell1[i] == approx(0.2 / (0.2 + alphas[i])).epsilon(1e-14));
  CHECK(ell1[3] == approx(1.0).epsilon(1e-8));

  // root of ell_1 - ell_2 found independently on oracle curves
  const auto diff = [](double a) {
    const std::vector<double> mu{a, a * (1.0 - a)};
    return oracle::overflow_lst(1.0, 0.2, mu, 0, mu[0]) - oracle::overflow_lst(1.0, 0.2, mu, 1, mu[1]);
  };
  double lo = 0.3, hi = 0.8;
  REQUIRE(diff(lo) * diff(hi) < 0.0);
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (diff(lo) * diff(mid) <= 0.0 ? hi : lo) = mid;
  }
  const double crossing = ell_crossing_alpha(model, 1.0);
  CHECK(crossing == approx(0.5 * (lo + hi)).epsilon(1e-7));
  CHECK(crossing == approx(1.0 - std::sqrt(0.2)).epsilon(1e-6));
}

TEST_CASE("tap solution") {
  const Allocation tap = tap_solution(0.25, 1.0, 10);
  for (std::size_t n = 1; n <= 10; ++n) CHECK(tap.rate(n) == approx(0.5 * std::pow(0.5, n - 1.0)).epsilon(1e-14));
  CHECK(*tap.tail_ratio() == approx(0.5));
  CHECK(tap.partial_sum(10) + tap.tail_mass() == approx(1.0).epsilon(1e-14));

  // truncated objective against direct summation; long series against the closed form
  for (double ell : {0.1, 0.25, 0.5}) {
    const Allocation long_tap = tap_solution(ell, 1.0, 400);
    std::vector<double> rates(long_tap.prefix().begin(), long_tap.prefix().end());
    double direct = 0.0;
    for (std::size_t n = 1; n <= rates.size(); ++n) direct += std::pow(ell, n) / rates[n - 1];
    direct *= (1.0 - ell) / ell;
    CHECK(tap_objective(ell, rates) == approx(direct).epsilon(1e-14));
    CHECK(tap_objective(ell, rates) == approx(tap_optimal_value(ell, 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("sqrt rho heuristic") {
  const Allocation h = sqrt_rho_heuristic(ArrivalModel::poisson(0.25), 1.0, 15);
  CHECK(h.rate(1) == approx(0.5));
  CHECK_THROWS_AS(sqrt_rho_heuristic(ArrivalModel::gamma(2.0, 0.25), 1.0, 15), DomainError);
}

TEST_CASE("scalar helpers") {
  const RootResult r = bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-14);
  CHECK(r.root == approx(std::sqrt(2.0)).epsilon(1e-13));
  CHECK_THROWS_AS(bisect([](double x) { return x + 1.0; }, 0.0, 1.0), NumericError);
  const MinimizeResult m = golden_section_minimize([](double x) { return (x - 0.3) * (x - 0.3); }, 0.0, 1.0, 1e-9);
  CHECK(m.argmin == approx(0.3).epsilon(1e-8));
}
