#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ordcap/arrival.hpp"

namespace ordcap {

struct SimConfig {
  ArrivalModel model = ArrivalModel::poisson(1.0);
  std::vector<double> rates;  // mu_1..mu_n; the first n servers of the ordered system
  std::uint64_t arrivals = 1'000'000;
  std::uint64_t warmup = 10'000;  // discarded, counted inside `arrivals`
  std::uint64_t seed = 1;
  std::size_t batches = 50;  // batch means for standard errors
};

/// Arrival-epoch statistics of one replication. Index j-1 holds level j unless noted.
struct SimResult {
  std::size_t servers = 0;
  std::uint64_t recorded = 0;  // arrivals after warmup
  std::vector<double> p_hat;   // fraction finding servers 1..j busy
  std::vector<double> p_se;
  std::vector<double> q_hat;   // p_hat[j-1] - p_hat[j], p_hat[0] = 1
  double delay_mean = 0.0;     // mean service time of served customers
  double delay_se = 0.0;
  std::vector<double> server_delay_mean;  // per server j, over customers it served
  std::vector<double> server_delay_se;
  std::uint64_t served = 0;
  std::uint64_t blocked = 0;               // found all n servers busy and left
  std::vector<double> overflow_mean;       // index j = 0..n: mean gap between arrivals finding 1..j busy
  std::vector<std::uint64_t> overflow_count;
};

/// Event-driven replication of the ordered-entry system truncated to the first n servers.
/// Each arrival takes the lowest-indexed idle server; arrivals finding all n busy are lost.
/// Reproducible per seed. Throws DomainError on an invalid config.
SimResult simulate(const SimConfig& config);

struct OverflowSample {
  std::size_t level = 0;
  std::uint64_t count = 0;
  double mean = 0.0;
  double mean_se = 0.0;
  std::vector<double> s;          // transform arguments requested
  std::vector<double> lst;        // sample mean of exp(-s T)
  std::vector<double> lst_se;
};

/// Gaps between consecutive post-warmup arrivals that find servers 1..level busy (level 0 is the
/// exogenous stream), with their empirical transform at the requested arguments. Overflow gaps
/// form a renewal sequence, so standard errors treat them as independent.
/// Throws InsufficientDataError with fewer than 100 gaps.
OverflowSample overflow_times(const SimConfig& config, std::size_t level, std::span<const double> lst_at = {});

/// Combines independent replications of the same system: inverse-variance weights for
/// p_hat and the delay, count weights for overflow means.
SimResult merge_replications(std::span<const SimResult> runs);

}  // namespace ordcap
