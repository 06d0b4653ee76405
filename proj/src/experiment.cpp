#include "ordcap/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "ordcap/errors.hpp"
#include "ordcap/geometric.hpp"
#include "ordcap/log.hpp"
#include "ordcap/metrics.hpp"
#include "ordcap/optimizer.hpp"
#include "ordcap/simulator.hpp"
#include "ordcap/stability.hpp"
#include "ordcap/table.hpp"

namespace ordcap {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  std::size_t used = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (value.empty() || used != value.size()) throw ConfigError("key '" + key + "': not a number: '" + raw + "'");
  return parsed;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig config;
  std::istringstream stream(text);
  std::string line;
  std::string section;
  int number = 0;
  while (std::getline(stream, line)) {
    ++number;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(number) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(number) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    if (config.has(key)) throw ConfigError("line " + std::to_string(number) + ": duplicate key '" + key + "'");
    config.values_[key] = trim(line.substr(eq + 1));
  }
  return config;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::string ExperimentConfig::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

std::string ExperimentConfig::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

double ExperimentConfig::number(const std::string& key) const { return parse_double(key, text(key)); }

double ExperimentConfig::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::size_t ExperimentConfig::count(const std::string& key, std::size_t fallback) const {
  if (!has(key)) return fallback;
  const double value = number(key);
  if (!(value >= 0.0) || value != std::floor(value) || value > 1e15) {
    throw ConfigError("key '" + key + "': expected a nonnegative integer");
  }
  return static_cast<std::size_t>(value);
}

std::vector<double> ExperimentConfig::numbers(const std::string& key, std::vector<double> fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  std::stringstream stream(text(key));
  std::string item;
  while (std::getline(stream, item, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Metrics:
      return "metrics";
    case Mode::Feasibility:
      return "feasibility";
    case Mode::EllCurves:
      return "ell_curves";
    case Mode::Tap:
      return "tap";
    case Mode::Optimize:
      return "optimize";
    case Mode::Simulate:
      return "simulate";
    case Mode::PaperGrid:
      return "paper_grid";
  }
  return "?";
}

Mode parse_mode(const std::string& name) {
  for (Mode mode : {Mode::Metrics, Mode::Feasibility, Mode::EllCurves, Mode::Tap, Mode::Optimize, Mode::Simulate,
                    Mode::PaperGrid}) {
    if (to_string(mode) == name) return mode;
  }
  throw ConfigError("unknown mode '" + name +
                    "' (expected metrics, feasibility, ell_curves, tap, optimize, simulate or paper_grid)");
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys{
      "mode",           "output.dir",      "workers",          "arrival.family",   "arrival.k",
      "arrival.lambda", "system.mu",       "allocation.kind",  "allocation.alpha", "allocation.ell",
      "allocation.rates", "allocation.M",  "feasibility.depth", "curves.alphas",   "curves.levels",
      "tap.ell",        "tap.M",           "opt.M",            "opt.tol_rate",     "opt.tol_obj",
      "opt.max_sweeps", "opt.restarts",    "opt.objective",    "opt.tau",          "opt.seed",
      "sim.arrivals",   "sim.warmup",      "sim.seed",         "sim.levels",       "sim.batches",
      "sim.replications", "grid.k",        "grid.rho",         "grid.fig6_rho"};
  return keys;
}

namespace {

// Runs body(i) for i < count on up to `workers` threads; rethrows the lowest-index failure.
template <class Body>
void parallel_for(std::size_t count, std::size_t workers, Body&& body) {
  std::vector<std::exception_ptr> failures(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

struct Context {
  const ExperimentConfig& config;
  fs::path out;
  std::size_t workers;
  std::ostream& report;

  void emit(const std::string& name, const Table& table, bool show = true) const {
    write_file(out / name, render_csv(table));
    if (show) report << name << '\n' << render_text(table) << '\n';
  }
};

// Setup errors in otherwise well-formed values (negative rates, alpha outside (0,1), ...) are
// configuration problems, not numeric failures.
template <class Build>
auto configured(Build&& build) {
  try {
    return build();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  } catch (const InvariantError& e) {
    throw ConfigError(e.what());
  } catch (const CapacityError& e) {
    throw ConfigError(e.what());
  }
}

ArrivalModel arrival_model(const ExperimentConfig& c) {
  const std::string family = c.text("arrival.family", "gamma");
  const double lambda = c.number("arrival.lambda");
  const double k = c.number("arrival.k", 1.0);
  return configured([&] {
    parse_arrival_family(family);
    return ArrivalModel::gamma(k, lambda);
  });
}

double capacity(const ExperimentConfig& c) {
  const double mu = c.number("system.mu", 1.0);
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("key 'system.mu': capacity must be positive");
  return mu;
}

Allocation build_allocation(const ExperimentConfig& c, const ArrivalModel& model, double mu) {
  const std::string kind = c.text("allocation.kind", "geometric");
  const std::size_t length = c.count("allocation.M", 15);
  if (length == 0) throw ConfigError("key 'allocation.M': must be at least 1");
  return configured([&]() -> Allocation {
    if (kind == "geometric") return geometric_allocation(c.number("allocation.alpha"), mu, length);
    if (kind == "tap") return tap_solution(c.number("allocation.ell"), mu, length);
    if (kind == "sqrt_rho") return sqrt_rho_heuristic(model, mu, length);
    if (kind == "construction") return feasible_construction(model, mu, c.number("allocation.alpha", 0.9), length).allocation;
    if (kind == "explicit") {
      if (!c.has("allocation.rates")) throw ConfigError("missing required key 'allocation.rates'");
      return Allocation(mu, c.numbers("allocation.rates", {}));
    }
    throw ConfigError("key 'allocation.kind': unknown kind '" + kind +
                      "' (expected geometric, tap, sqrt_rho, construction or explicit)");
  });
}

std::size_t allocation_depth(const ExperimentConfig& c, const Allocation& allocation) {
  return std::min(c.count("allocation.M", 15), allocation.defined_levels());
}

OptimizerConfig optimizer_config(const ExperimentConfig& c) {
  OptimizerConfig config;
  config.horizon = c.count("opt.M", config.horizon);
  config.tol_rate = c.number("opt.tol_rate", config.tol_rate);
  config.tol_obj = c.number("opt.tol_obj", config.tol_obj);
  config.max_sweeps = c.count("opt.max_sweeps", config.max_sweeps);
  config.restarts = c.count("opt.restarts", config.restarts);
  config.seed = c.count("opt.seed", config.seed);
  const std::string objective = c.text("opt.objective", "delay");
  if (objective == "delay") {
    config.objective = Objective::delay();
  } else if (objective == "deadline") {
    const double tau = c.number("opt.tau");
    config.objective = configured([&] { return Objective::deadline(tau); });
  } else {
    throw ConfigError("key 'opt.objective': unknown objective '" + objective + "' (expected delay or deadline)");
  }
  if (config.horizon < 1 || config.horizon > config.max_level) {
    throw ConfigError("key 'opt.M': horizon must lie in [1, " + std::to_string(config.max_level) + "]");
  }
  if (!(config.tol_rate > 0.0) || !(config.tol_obj > 0.0)) throw ConfigError("optimizer tolerances must be positive");
  return config;
}

Table metrics_table(const SystemMetrics& m) {
  Table table{{"n", "mu_n", "p_n", "q_n", "ell_n", "ell_lower_n", "rho_n"}, {}};
  for (std::size_t n = 1; n <= m.depth; ++n) {
    table.add_row({static_cast<double>(n), m.rates[n - 1], m.p[n], m.q[n - 1], m.ell[n - 1], m.ell_lower[n - 1],
                   m.rho_eff[n]});
  }
  return table;
}

Table delay_summary(const SystemMetrics& m) {
  Table table{{"delay_truncated", "residual", "delay_total", "rho_0"}, {}};
  table.add_row({m.delay_truncated, m.residual.value(), m.delay_total.value(), m.rho_eff[0]});
  return table;
}

void run_metrics(const Context& ctx) {
  const ArrivalModel model = arrival_model(ctx.config);
  const double mu = capacity(ctx.config);
  const Allocation allocation = build_allocation(ctx.config, model, mu);
  OverflowChain chain(model, allocation);
  const SystemMetrics metrics = compute_metrics(chain, allocation_depth(ctx.config, allocation));
  ctx.emit("metrics.csv", metrics_table(metrics));
  ctx.emit("metrics_summary.csv", delay_summary(metrics));
}

void run_feasibility(const Context& ctx) {
  const ArrivalModel model = arrival_model(ctx.config);
  const double mu = capacity(ctx.config);
  const Allocation allocation = build_allocation(ctx.config, model, mu);
  const std::size_t depth = ctx.config.count("feasibility.depth", allocation_depth(ctx.config, allocation));
  if (depth == 0 || depth > allocation.defined_levels()) {
    throw ConfigError("key 'feasibility.depth': must lie in [1, number of defined rates]");
  }
  OverflowChain chain(model, allocation);
  const StabilityReport stability = is_feasible(chain, depth);
  Table table{{"n", "mu_n", "p_n", "margin_n"}, {}};
  for (std::size_t n = 1; n <= stability.blocking.size(); ++n) {
    table.add_row({static_cast<double>(n), allocation.rate(n), stability.blocking[n - 1], stability.margins[n - 1]});
  }
  ctx.emit("feasibility.csv", table);
  std::string verdicts = "feasibility: " + to_string(stability.verdict) + "\n";
  if (!stability.note.empty()) verdicts += "note: " + stability.note + "\n";
  try {
    const FiniteDelayReport delay = finite_delay_diagnostics(chain, depth);
    verdicts += "finite_delay: " + to_string(delay.verdict) + "\n";
  } catch (const Error& e) {
    verdicts += "finite_delay: inconclusive (" + std::string(e.what()) + ")\n";
  }
  write_file(ctx.out / "feasibility.txt", verdicts);
  ctx.report << verdicts;
}

std::vector<double> default_alphas() {
  std::vector<double> alphas;
  for (int i = 1; i <= 99; ++i) alphas.push_back(i / 100.0);
  return alphas;
}

void run_ell_curves(const Context& ctx) {
  const ArrivalModel model = arrival_model(ctx.config);
  const double mu = capacity(ctx.config);
  const std::vector<double> alphas = ctx.config.numbers("curves.alphas", default_alphas());
  const std::size_t levels = ctx.config.count("curves.levels", 5);
  if (levels == 0 || levels > 25) throw ConfigError("key 'curves.levels': must lie in [1, 25]");
  for (double alpha : alphas) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("key 'curves.alphas': values must lie in (0, 1)");
  }

  std::vector<std::vector<double>> curves(levels);
  parallel_for(levels, ctx.workers, [&](std::size_t i) { curves[i] = ell_alpha_curve(model, mu, alphas, i + 1); });
  Table table{{"alpha", "n", "ell_n_alpha"}, {}};
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    for (std::size_t n = 1; n <= levels; ++n) table.add_row({alphas[a], static_cast<double>(n), curves[n - 1][a]});
  }
  ctx.emit("fig1.csv", table, false);
  ctx.report << "fig1.csv: " << table.rows.size() << " rows\n";

  Table crossing{{"k", "alpha_cross"}, {}};
  double cross = std::nan("");
  try {
    cross = ell_crossing_alpha(model, mu);
  } catch (const NumericError& e) {
    log_warn(std::string("no ell_1/ell_2 crossing: ") + e.what());
  }
  crossing.add_row({model.shape(), cross});
  ctx.emit("crossing.csv", crossing);
}

void run_tap(const Context& ctx) {
  const double mu = capacity(ctx.config);
  const std::vector<double> ells = ctx.config.numbers("tap.ell", {0.1, 0.25, 0.5});
  const std::size_t length = ctx.config.count("tap.M", 30);
  if (length == 0) throw ConfigError("key 'tap.M': must be at least 1");
  Table series{{"ell", "n", "mu_n"}, {}};
  Table summary{{"ell", "closed_form_value", "truncated_objective"}, {}};
  for (double ell : ells) {
    const Allocation solution = configured([&] { return tap_solution(ell, mu, length); });
    for (std::size_t n = 1; n <= length; ++n) series.add_row({ell, static_cast<double>(n), solution.rate(n)});
    summary.add_row({ell, tap_optimal_value(ell, mu), tap_objective(ell, solution.prefix())});
  }
  ctx.emit("tap.csv", series, false);
  ctx.emit("tap_summary.csv", summary);
}

void write_optimization(const Context& ctx, const OptimizationResult& result, const std::string& stem) {
  ctx.emit(stem + ".csv", metrics_table(result.metrics));
  Table summary{{"objective", "residual", "sweeps", "mu_1", "tail_ratio"}, {}};
  summary.add_row({result.objective_value.value(), result.residual.value(), static_cast<double>(result.sweeps),
                   result.allocation.rate(1), result.allocation.tail_ratio().value_or(std::nan(""))});
  ctx.emit(stem + "_summary.csv", summary);
  Table trace{{"sweep", "objective"}, {}};
  for (std::size_t i = 0; i < result.trace.size(); ++i) trace.add_row({static_cast<double>(i), result.trace[i]});
  ctx.emit(stem + "_trace.csv", trace, false);
  Table starts{{"start", "objective", "sweeps"}, {}};
  for (std::size_t i = 0; i < result.starts.size(); ++i) {
    starts.add_row({static_cast<double>(i), result.starts[i].objective.value(),
                    static_cast<double>(result.starts[i].sweeps)});
  }
  ctx.emit(stem + "_starts.csv", starts);
}

void run_optimize(const Context& ctx) {
  const ArrivalModel model = arrival_model(ctx.config);
  const double mu = capacity(ctx.config);
  OptimizerConfig config = optimizer_config(ctx.config);
  config.workers = ctx.workers;
  if (!(model.rate() < mu)) throw ConfigError("optimization needs arrival.lambda < system.mu");
  write_optimization(ctx, optimize_allocation(model, mu, config), "optimize");
}

void run_simulate(const Context& ctx) {
  const ArrivalModel model = arrival_model(ctx.config);
  const double mu = capacity(ctx.config);
  const Allocation allocation = build_allocation(ctx.config, model, mu);
  const std::size_t levels = ctx.config.count("sim.levels", allocation_depth(ctx.config, allocation));
  if (levels == 0 || levels > allocation.defined_levels()) {
    throw ConfigError("key 'sim.levels': must lie in [1, number of defined rates]");
  }
  SimConfig sim;
  sim.model = model;
  for (std::size_t n = 1; n <= levels; ++n) sim.rates.push_back(allocation.rate(n));
  sim.arrivals = ctx.config.count("sim.arrivals", sim.arrivals);
  sim.warmup = ctx.config.count("sim.warmup", sim.warmup);
  sim.seed = ctx.config.count("sim.seed", sim.seed);
  sim.batches = ctx.config.count("sim.batches", sim.batches);
  const std::size_t replications = ctx.config.count("sim.replications", 1);
  if (replications == 0) throw ConfigError("key 'sim.replications': must be at least 1");
  if (!(sim.arrivals > sim.warmup)) throw ConfigError("key 'sim.arrivals': must exceed sim.warmup");
  if (sim.batches < 2 || sim.arrivals - sim.warmup < sim.batches) {
    throw ConfigError("key 'sim.batches': need at least two batches and one arrival per batch");
  }

  std::vector<SimResult> runs(replications);
  parallel_for(replications, ctx.workers, [&](std::size_t r) {
    SimConfig config = sim;
    config.seed = sim.seed + r;
    runs[r] = simulate(config);
  });
  const SimResult result = merge_replications(runs);

  Table table{{"j", "p_hat", "p_se", "q_hat", "delay_mean", "delay_se", "overflow_mean"}, {}};
  for (std::size_t j = 1; j <= levels; ++j) {
    table.add_row({static_cast<double>(j), result.p_hat[j - 1], result.p_se[j - 1], result.q_hat[j - 1],
                   result.server_delay_mean[j - 1], result.server_delay_se[j - 1], result.overflow_mean[j]});
  }
  ctx.emit("simulate.csv", table);
  Table summary{{"recorded", "served", "blocked", "delay_mean", "delay_se", "interarrival_mean"}, {}};
  summary.add_row({static_cast<double>(result.recorded), static_cast<double>(result.served),
                   static_cast<double>(result.blocked), result.delay_mean, result.delay_se, result.overflow_mean[0]});
  ctx.emit("simulate_summary.csv", summary);

  OverflowChain chain(model, allocation);
  const auto analytic = blocking_probabilities(chain, levels);
  Table compare{{"j", "p_analytic", "p_hat", "z"}, {}};
  for (std::size_t j = 1; j <= levels; ++j) {
    const double se = result.p_se[j - 1];
    compare.add_row({static_cast<double>(j), analytic[j - 1], result.p_hat[j - 1],
                     se > 0.0 ? (result.p_hat[j - 1] - analytic[j - 1]) / se : std::nan("")});
  }
  ctx.emit("simulate_compare.csv", compare);
}

std::string cell_name(double k, double rho) {
  return "k" + format_number(k, 6) + "_rho" + format_number(rho, 6) + ".csv";
}

struct CellOutcome {
  double k = 0.0;
  double rho = 0.0;
  std::optional<OptimizationResult> result;
  std::string failure;
};

int run_paper_grid(const Context& ctx) {
  const double mu = capacity(ctx.config);
  const std::vector<double> ks = ctx.config.numbers("grid.k", {0.5, 1.0, 2.0, 5.0, 10.0});
  const std::vector<double> rhos = ctx.config.numbers("grid.rho", {0.2, 0.4, 0.6, 0.8});
  const std::vector<double> fig6 = ctx.config.numbers("grid.fig6_rho", {0.2, 0.5, 0.8});
  OptimizerConfig config = optimizer_config(ctx.config);
  config.workers = 1;  // cells are the unit of parallelism
  for (double k : ks) {
    if (!(k > 0.0)) throw ConfigError("key 'grid.k': shapes must be positive");
  }
  for (const auto* list : {&rhos, &fig6}) {
    for (double rho : *list) {
      if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("key 'grid.rho'/'grid.fig6_rho': values must lie in (0, 1)");
    }
  }

  std::vector<CellOutcome> cells;
  for (double k : ks) {
    for (double rho : rhos) cells.push_back({k, rho, std::nullopt, ""});
  }
  for (double rho : fig6) {
    const bool present = std::any_of(cells.begin(), cells.end(),
                                     [&](const CellOutcome& c) { return c.k == 1.0 && c.rho == rho; });
    if (!present) cells.push_back({1.0, rho, std::nullopt, ""});
  }

  parallel_for(cells.size(), ctx.workers, [&](std::size_t i) {
    CellOutcome& cell = cells[i];
    try {
      cell.result = optimize_allocation(ArrivalModel::gamma(cell.k, cell.rho * mu), mu, config);
      log_info("cell k=" + format_number(cell.k, 6) + " rho=" + format_number(cell.rho, 6) + " done");
    } catch (const Error& e) {
      cell.failure = e.what();
      log_warn("cell k=" + format_number(cell.k, 6) + " rho=" + format_number(cell.rho, 6) + " failed: " + e.what());
    }
  });

  fs::create_directories(ctx.out / "series");
  Table table1{{"k", "rho", "ES", "rM"}, {}};
  std::vector<std::string> failed;
  for (const CellOutcome& cell : cells) {
    const bool in_grid = std::find(ks.begin(), ks.end(), cell.k) != ks.end() &&
                         std::find(rhos.begin(), rhos.end(), cell.rho) != rhos.end();
    if (!cell.result) {
      failed.push_back("k=" + format_number(cell.k, 6) + " rho=" + format_number(cell.rho, 6) + ": " + cell.failure);
      if (in_grid) table1.add_row({cell.k, cell.rho, std::nan(""), std::nan("")});
      continue;
    }
    const OptimizationResult& r = *cell.result;
    if (in_grid) table1.add_row({cell.k, cell.rho, r.objective_value.value(), r.residual.value()});
    Table series{{"n", "mu_n", "ell_n", "rho_n"}, {}};
    for (std::size_t n = 1; n <= r.metrics.depth; ++n) {
      series.add_row({static_cast<double>(n), r.metrics.rates[n - 1], r.metrics.ell[n - 1], r.metrics.rho_eff[n]});
    }
    write_file(ctx.out / "series" / cell_name(cell.k, cell.rho), render_csv(series));
  }
  ctx.emit("table1.csv", table1);

  Table fig6_table{{"rho", "mu1", "one_minus_sqrt_rho"}, {}};
  for (double rho : fig6) {
    const auto it = std::find_if(cells.begin(), cells.end(),
                                 [&](const CellOutcome& c) { return c.k == 1.0 && c.rho == rho; });
    const double mu1 = it->result ? it->result->allocation.rate(1) / mu : std::nan("");
    fig6_table.add_row({rho, mu1, 1.0 - std::sqrt(rho)});
  }
  ctx.emit("fig6.csv", fig6_table);

  if (failed.empty()) return kExitOk;
  ctx.report << "cells without a finite optimum:\n";
  for (const auto& line : failed) ctx.report << "  " << line << '\n';
  return kExitNumeric;
}

}  // namespace

int run_experiment(const ExperimentConfig& config, const RunOverrides& overrides, std::ostream& report,
                   std::ostream& errors) {
  try {
    std::vector<std::string> unknown;
    const auto& known = known_config_keys();
    for (const auto& [key, value] : config.values()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) unknown.push_back(key);
    }
    if (!unknown.empty()) {
      std::string list;
      for (const auto& key : unknown) list += (list.empty() ? "" : ", ") + key;
      throw ConfigError("unknown config keys: " + list);
    }
    const Mode mode = parse_mode(config.text("mode"));
    const fs::path out = overrides.out.value_or(fs::path(config.text("output.dir", "out")));
    const std::size_t workers = overrides.workers.value_or(config.count("workers", 1));
    if (workers == 0) throw ConfigError("workers must be at least 1");
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw ConfigError("cannot create output directory '" + out.string() + "': " + ec.message());

    const Context ctx{config, out, workers, report};
    switch (mode) {
      case Mode::Metrics:
        run_metrics(ctx);
        break;
      case Mode::Feasibility:
        run_feasibility(ctx);
        break;
      case Mode::EllCurves:
        run_ell_curves(ctx);
        break;
      case Mode::Tap:
        run_tap(ctx);
        break;
      case Mode::Optimize:
        run_optimize(ctx);
        break;
      case Mode::Simulate:
        run_simulate(ctx);
        break;
      case Mode::PaperGrid:
        return run_paper_grid(ctx);
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    errors << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    errors << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace ordcap
