#include <cmath>

#include "oracles.hpp"
#include "ordcap/errors.hpp"
#include "ordcap/metrics.hpp"
#include "ordcap/optimizer.hpp"
#include "ordcap/simulator.hpp"
#include "test_main.hpp"

using namespace ordcap;

namespace {

bool within_3se(double estimate, double se, double exact) { return std::abs(estimate - exact) <= 3.0 * se; }

}  // namespace

TEST_CASE("single server loss system") {
  SimConfig config;
  config.model = ArrivalModel::poisson(0.2);
  config.rates = {0.5};
  const SimResult r = simulate(config);
  CHECK(r.recorded == config.arrivals - config.warmup);
  CHECK(within_3se(r.p_hat[0], r.p_se[0], 0.2 / 0.7));
  CHECK(r.served + r.blocked == r.recorded);
  CHECK(within_3se(r.delay_mean, r.delay_se, 2.0));
}

TEST_CASE("homogeneous servers match Erlang B") {
  SimConfig config;
  config.model = ArrivalModel::poisson(0.2);
  config.rates = {0.5, 0.5, 0.5};
  config.seed = 3;
  const SimResult r = simulate(config);
  CHECK(within_3se(r.p_hat[2], r.p_se[2], oracle::erlang_b(3, 0.4)));
}

TEST_CASE("served delay against the analytic engine") {
  const ArrivalModel model = ArrivalModel::poisson(0.4);
  OptimizerConfig opt;
  opt.restarts = 0;
  const OptimizationResult best = optimize_allocation(model, 1.0, opt);
  SimConfig config;
  config.model = model;
  config.rates.assign(best.allocation.prefix().begin(), best.allocation.prefix().end());
  config.seed = 5;
  const SimResult r = simulate(config);
  const SystemMetrics& m = best.metrics;
  const double served_delay = m.delay_truncated / (1.0 - m.p.back());
  CHECK(within_3se(r.delay_mean, r.delay_se, served_delay));
  for (std::size_t j = 0; j < 15; ++j) {
    CAPTURE(j);
    if (r.p_se[j] > 0.0) CHECK(std::abs(r.p_hat[j] - m.p[j + 1]) <= 4.0 * r.p_se[j]);
  }
}

TEST_CASE("overflow gaps") {
  SimConfig config;
  config.model = ArrivalModel::poisson(0.2);
  config.rates = {0.5, 0.3};
  config.seed = 9;
  const OverflowSample base = overflow_times(config, 0);
  CHECK(within_3se(base.mean, base.mean_se, 5.0));

  SimConfig single = config;
  single.rates = {0.5};
  const OverflowSample first = overflow_times(single, 1);
  CHECK(within_3se(first.mean, first.mean_se, 17.5));

  const std::vector<double> at{0.3};
  const OverflowSample transform = overflow_times(config, 1, at);
  OverflowChain chain(config.model, Allocation(1.0, config.rates));
  CHECK(within_3se(transform.lst[0], transform.lst_se[0], chain.lst(1, 0.3)));

  const SimResult r = simulate(config);
  CHECK(r.overflow_mean[1] == approx(transform.mean).epsilon(1e-12));
  CHECK(r.overflow_count[1] == transform.count);
}

TEST_CASE("reproducible per seed and mergeable") {
  SimConfig config;
  config.model = ArrivalModel::gamma(2.0, 0.5);
  config.rates = {0.4, 0.3, 0.2};
  config.arrivals = 50'000;
  config.warmup = 1'000;
  const SimResult a = simulate(config);
  const SimResult b = simulate(config);
  CHECK(a.p_hat == b.p_hat);
  CHECK(a.delay_mean == b.delay_mean);
  config.seed = 2;
  const SimResult c = simulate(config);
  CHECK(a.p_hat != c.p_hat);

  const std::vector<SimResult> runs{a, c};
  const SimResult merged = merge_replications(runs);
  CHECK(merged.recorded == a.recorded + c.recorded);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(merged.p_hat[j] >= std::min(a.p_hat[j], c.p_hat[j]));
    CHECK(merged.p_hat[j] <= std::max(a.p_hat[j], c.p_hat[j]));
    CHECK(merged.p_se[j] < std::min(a.p_se[j], c.p_se[j]));
  }
}

TEST_CASE("invalid runs") {
  SimConfig config;
  config.rates = {0.5};
  config.arrivals = 500;
  config.warmup = 10;
  CHECK_THROWS_AS(overflow_times(config, 2), LevelError);
  config.model = ArrivalModel::poisson(0.01);
  config.rates = {5.0};
  CHECK_THROWS_AS(overflow_times(config, 1), InsufficientDataError);
  config.rates = {};
  CHECK_THROWS_AS(simulate(config), DomainError);
  config.rates = {0.5};
  config.warmup = 500;
  CHECK_THROWS_AS(simulate(config), DomainError);
}
