#include "ordcap/simulator.hpp"

#include <cmath>
#include <functional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <utility>

#include "ordcap/errors.hpp"

namespace ordcap {

namespace {

void validate(const SimConfig& config) {
  if (config.rates.empty()) throw DomainError("simulation needs at least one server");
  for (double rate : config.rates) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("simulation rates must be positive");
  }
  if (!(config.arrivals > config.warmup)) throw DomainError("arrivals must exceed warmup");
  if (config.batches < 2) throw DomainError("at least two batches are needed");
  if (config.arrivals - config.warmup < config.batches) throw DomainError("fewer recorded arrivals than batches");
}

// Calls visit(recorded_index, time, depth, service) for every post-warmup arrival, where depth is
// the number of leading busy servers and service is negative for a lost arrival.
template <class Visit>
void run_events(const SimConfig& config, Visit&& visit) {
  const std::size_t n = config.rates.size();
  std::mt19937_64 rng(config.seed);
  std::vector<std::exponential_distribution<double>> service;
  service.reserve(n);
  for (double rate : config.rates) service.emplace_back(rate);

  using Completion = std::pair<double, std::size_t>;
  std::priority_queue<Completion, std::vector<Completion>, std::greater<>> busy;
  std::set<std::size_t> idle;
  for (std::size_t i = 0; i < n; ++i) idle.insert(i);

  double clock = 0.0;
  for (std::uint64_t a = 0; a < config.arrivals; ++a) {
    clock += config.model.sample(rng);
    while (!busy.empty() && busy.top().first <= clock) {
      idle.insert(busy.top().second);
      busy.pop();
    }
    const std::size_t depth = idle.empty() ? n : *idle.begin();
    double duration = -1.0;
    if (depth < n) {
      idle.erase(idle.begin());
      duration = service[depth](rng);
      busy.emplace(clock + duration, depth);
    }
    if (a >= config.warmup) visit(a - config.warmup, clock, depth, duration);
  }
}

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t count = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++count;
  }
  double mean() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }
  // standard error of the mean treating observations as independent
  double standard_error() const {
    if (count < 2) return 0.0;
    const double c = static_cast<double>(count);
    const double m = sum / c;
    const double variance = std::max(0.0, (sum_sq - c * m * m) / (c - 1.0));
    return std::sqrt(variance / c);
  }
};

}  // namespace

SimResult simulate(const SimConfig& config) {
  validate(config);
  const std::size_t n = config.rates.size();
  const std::uint64_t recorded = config.arrivals - config.warmup;
  const std::size_t batches = config.batches;

  // reached[b][j] counts arrivals in batch b with depth >= j+1
  std::vector<std::vector<std::uint64_t>> reached(batches, std::vector<std::uint64_t>(n, 0));
  std::vector<std::uint64_t> batch_size(batches, 0);
  std::vector<double> batch_delay(batches, 0.0);
  std::vector<std::uint64_t> batch_served(batches, 0);
  std::vector<std::vector<double>> server_delay(batches, std::vector<double>(n, 0.0));
  std::vector<std::vector<std::uint64_t>> server_served(batches, std::vector<std::uint64_t>(n, 0));
  std::vector<double> last_time(n + 1, -1.0);
  std::vector<double> gap_sum(n + 1, 0.0);
  std::vector<std::uint64_t> gap_count(n + 1, 0);
  std::uint64_t blocked = 0;

  run_events(config, [&](std::uint64_t index, double time, std::size_t depth, double service) {
    const auto b = static_cast<std::size_t>(index * batches / recorded);
    ++batch_size[b];
    for (std::size_t j = 0; j < depth; ++j) ++reached[b][j];
    if (service >= 0.0) {
      batch_delay[b] += service;
      ++batch_served[b];
      server_delay[b][depth] += service;
      ++server_served[b][depth];
    } else {
      ++blocked;
    }
    for (std::size_t j = 0; j <= depth; ++j) {
      if (last_time[j] >= 0.0) {
        gap_sum[j] += time - last_time[j];
        ++gap_count[j];
      }
      last_time[j] = time;
    }
  });

  SimResult result;
  result.servers = n;
  result.recorded = recorded;
  result.blocked = blocked;
  for (std::size_t j = 0; j < n; ++j) {
    std::uint64_t total = 0;
    Moments across;
    for (std::size_t b = 0; b < batches; ++b) {
      total += reached[b][j];
      across.add(static_cast<double>(reached[b][j]) / static_cast<double>(batch_size[b]));
    }
    result.p_hat.push_back(static_cast<double>(total) / static_cast<double>(recorded));
    result.p_se.push_back(across.standard_error());
  }
  double previous = 1.0;
  for (double p : result.p_hat) {
    result.q_hat.push_back(previous - p);
    previous = p;
  }

  double delay_total = 0.0;
  Moments delay_batches;
  for (std::size_t b = 0; b < batches; ++b) {
    delay_total += batch_delay[b];
    result.served += batch_served[b];
    if (batch_served[b] > 0) delay_batches.add(batch_delay[b] / static_cast<double>(batch_served[b]));
  }
  result.delay_mean = result.served == 0 ? 0.0 : delay_total / static_cast<double>(result.served);
  result.delay_se = delay_batches.standard_error();
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    std::uint64_t count = 0;
    Moments across;
    for (std::size_t b = 0; b < batches; ++b) {
      sum += server_delay[b][j];
      count += server_served[b][j];
      if (server_served[b][j] > 0) across.add(server_delay[b][j] / static_cast<double>(server_served[b][j]));
    }
    result.server_delay_mean.push_back(count == 0 ? std::nan("") : sum / static_cast<double>(count));
    result.server_delay_se.push_back(across.standard_error());
  }

  for (std::size_t j = 0; j <= n; ++j) {
    result.overflow_count.push_back(gap_count[j]);
    result.overflow_mean.push_back(gap_count[j] == 0 ? std::nan("") : gap_sum[j] / static_cast<double>(gap_count[j]));
  }
  return result;
}

OverflowSample overflow_times(const SimConfig& config, std::size_t level, std::span<const double> lst_at) {
  validate(config);
  if (level > config.rates.size()) {
    throw LevelError("overflow level " + std::to_string(level) + " exceeds the simulated servers");
  }
  for (double s : lst_at) {
    if (!(s >= 0.0)) throw DomainError("transform argument must be nonnegative");
  }

  Moments gaps;
  std::vector<Moments> transforms(lst_at.size());
  double last = -1.0;
  run_events(config, [&](std::uint64_t, double time, std::size_t depth, double) {
    if (depth < level) return;
    if (last >= 0.0) {
      const double gap = time - last;
      gaps.add(gap);
      for (std::size_t i = 0; i < lst_at.size(); ++i) transforms[i].add(std::exp(-lst_at[i] * gap));
    }
    last = time;
  });

  if (gaps.count < 100) {
    throw InsufficientDataError("only " + std::to_string(gaps.count) + " overflow gaps observed at level " +
                                std::to_string(level) + " (need 100)");
  }
  OverflowSample sample;
  sample.level = level;
  sample.count = gaps.count;
  sample.mean = gaps.mean();
  sample.mean_se = gaps.standard_error();
  sample.s.assign(lst_at.begin(), lst_at.end());
  for (const Moments& m : transforms) {
    sample.lst.push_back(m.mean());
    sample.lst_se.push_back(m.standard_error());
  }
  return sample;
}

SimResult merge_replications(std::span<const SimResult> runs) {
  if (runs.empty()) throw DomainError("nothing to merge");
  const std::size_t n = runs.front().servers;
  for (const SimResult& run : runs) {
    if (run.servers != n) throw DomainError("replications simulate different server counts");
  }
  if (runs.size() == 1) return runs.front();

  // inverse-variance mean; equal weights when any standard error vanishes
  const auto combine = [&](auto value_of, auto se_of) {
    bool usable = true;
    for (const SimResult& run : runs) usable = usable && se_of(run) > 0.0;
    double weight_sum = 0.0;
    double weighted = 0.0;
    for (const SimResult& run : runs) {
      const double se = se_of(run);
      const double w = usable ? 1.0 / (se * se) : 1.0;
      weight_sum += w;
      weighted += w * value_of(run);
    }
    const double mean = weighted / weight_sum;
    double se = 0.0;
    if (usable) {
      se = std::sqrt(1.0 / weight_sum);
    } else {
      for (const SimResult& run : runs) se += se_of(run) * se_of(run);
      se = std::sqrt(se) / static_cast<double>(runs.size());
    }
    return std::pair{mean, se};
  };

  SimResult merged;
  merged.servers = n;
  for (const SimResult& run : runs) {
    merged.recorded += run.recorded;
    merged.served += run.served;
    merged.blocked += run.blocked;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const auto [mean, se] = combine([j](const SimResult& r) { return r.p_hat[j]; },
                                    [j](const SimResult& r) { return r.p_se[j]; });
    merged.p_hat.push_back(mean);
    merged.p_se.push_back(se);
  }
  double previous = 1.0;
  for (double p : merged.p_hat) {
    merged.q_hat.push_back(previous - p);
    previous = p;
  }
  const auto [delay, delay_se] = combine([](const SimResult& r) { return r.delay_mean; },
                                         [](const SimResult& r) { return r.delay_se; });
  merged.delay_mean = delay;
  merged.delay_se = delay_se;
  for (std::size_t j = 0; j < n; ++j) {
    const auto [mean, se] = combine([j](const SimResult& r) { return r.server_delay_mean[j]; },
                                    [j](const SimResult& r) { return r.server_delay_se[j]; });
    merged.server_delay_mean.push_back(mean);
    merged.server_delay_se.push_back(se);
  }

  for (std::size_t j = 0; j <= n; ++j) {
    double total = 0.0;
    std::uint64_t count = 0;
    for (const SimResult& run : runs) {
      if (run.overflow_count[j] == 0) continue;
      total += run.overflow_mean[j] * static_cast<double>(run.overflow_count[j]);
      count += run.overflow_count[j];
    }
    merged.overflow_count.push_back(count);
    merged.overflow_mean.push_back(count == 0 ? std::nan("") : total / static_cast<double>(count));
  }
  return merged;
}

}  // namespace ordcap
