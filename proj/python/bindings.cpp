#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ordcap/errors.hpp"
#include "ordcap/experiment.hpp"
#include "ordcap/geometric.hpp"
#include "ordcap/metrics.hpp"
#include "ordcap/optimizer.hpp"
#include "ordcap/simulator.hpp"
#include "ordcap/stability.hpp"

namespace py = pybind11;
using namespace ordcap;

namespace {

std::vector<double> rates_of(const Allocation& a) { return {a.prefix().begin(), a.prefix().end()}; }

double extended(const Extended& e) { return e.value(); }

}  // namespace

PYBIND11_MODULE(_ordcap, m) {
  m.doc() = "Capacity allocation for ordered-entry loss systems with heterogeneous servers";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<LevelError>(m, "LevelError", base.ptr());
  py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<InvariantError>(m, "InvariantError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", base.ptr());

  py::class_<ArrivalModel>(m, "ArrivalModel")
      .def_static("gamma", &ArrivalModel::gamma, py::arg("shape"), py::arg("rate"))
      .def_static("poisson", &ArrivalModel::poisson, py::arg("rate"))
      .def_property_readonly("shape", &ArrivalModel::shape)
      .def_property_readonly("rate", &ArrivalModel::rate)
      .def_property_readonly("mean", &ArrivalModel::mean)
      .def_property_readonly("variance", &ArrivalModel::variance)
      .def("lst", &ArrivalModel::lst, py::arg("s"))
      .def("lst_derivative", &ArrivalModel::lst_derivative, py::arg("s"))
      .def("__repr__", [](const ArrivalModel& a) {
        std::ostringstream s;
        s << "ArrivalModel.gamma(shape=" << a.shape() << ", rate=" << a.rate() << ")";
        return s.str();
      });

  py::class_<Allocation>(m, "Allocation")
      .def(py::init<double, std::vector<double>, std::optional<double>>(), py::arg("capacity"), py::arg("prefix"),
           py::arg("tail_ratio") = py::none())
      .def_property_readonly("capacity", &Allocation::capacity)
      .def_property_readonly("prefix", rates_of)
      .def_property_readonly("tail_ratio", &Allocation::tail_ratio)
      .def("rate", &Allocation::rate, py::arg("n"))
      .def("partial_sum", &Allocation::partial_sum, py::arg("n"))
      .def("remaining", &Allocation::remaining, py::arg("n"))
      .def("is_non_increasing", &Allocation::is_non_increasing);

  py::class_<OverflowChain>(m, "OverflowChain")
      .def(py::init([](const ArrivalModel& model, const Allocation& allocation, std::size_t max_level, bool memoize) {
             return OverflowChain(model, allocation, ChainOptions{max_level, memoize});
           }),
           py::arg("model"), py::arg("allocation"), py::arg("max_level") = 25, py::arg("memoize") = true)
      .def("lst", &OverflowChain::lst, py::arg("n"), py::arg("s"))
      .def("lst_derivative", &OverflowChain::lst_derivative, py::arg("n"), py::arg("s"))
      .def("ell", &OverflowChain::ell, py::arg("n"))
      .def("mean_overflow_time", &OverflowChain::mean_overflow_time, py::arg("n"))
      .def("available_levels", &OverflowChain::available_levels);

  py::class_<SystemMetrics>(m, "SystemMetrics")
      .def_readonly("depth", &SystemMetrics::depth)
      .def_readonly("rates", &SystemMetrics::rates)
      .def_readonly("p", &SystemMetrics::p)
      .def_readonly("q", &SystemMetrics::q)
      .def_readonly("ell", &SystemMetrics::ell)
      .def_readonly("ell_lower", &SystemMetrics::ell_lower)
      .def_readonly("rho_eff", &SystemMetrics::rho_eff)
      .def_readonly("delay_truncated", &SystemMetrics::delay_truncated)
      .def_property_readonly("residual", [](const SystemMetrics& s) { return extended(s.residual); })
      .def_property_readonly("delay_total", [](const SystemMetrics& s) { return extended(s.delay_total); });

  m.def("blocking_probabilities", &blocking_probabilities, py::arg("chain"), py::arg("depth"));
  m.def(
      "fastest_idle_distribution",
      [](const std::vector<double>& p) { return fastest_idle_distribution(p); }, py::arg("blocking"));
  m.def("compute_metrics", &compute_metrics, py::arg("chain"), py::arg("depth"));
  m.def(
      "residual_tail", [](double p, double rate, double ell) { return extended(residual_tail(p, rate, ell)); },
      py::arg("p_last"), py::arg("rate_last"), py::arg("ell_last"));

  m.def(
      "is_feasible",
      [](OverflowChain& chain, std::size_t depth) {
        const StabilityReport r = is_feasible(chain, depth);
        py::dict out;
        out["verdict"] = to_string(r.verdict);
        out["feasible_up_to"] = r.feasible_up_to;
        out["margins"] = r.margins;
        out["blocking"] = r.blocking;
        out["note"] = r.note;
        return out;
      },
      py::arg("chain"), py::arg("depth"));
  m.def("max_first_rate", &max_first_rate, py::arg("model"), py::arg("capacity"));
  m.def(
      "feasible_construction",
      [](const ArrivalModel& model, double capacity, double alpha, std::size_t length) {
        return feasible_construction(model, capacity, alpha, length).allocation;
      },
      py::arg("model"), py::arg("capacity"), py::arg("alpha"), py::arg("length"));

  m.def("geometric_allocation", &geometric_allocation, py::arg("alpha"), py::arg("capacity"), py::arg("length"));
  m.def(
      "ell_alpha_curve",
      [](const ArrivalModel& model, double capacity, const std::vector<double>& alphas, std::size_t level) {
        return ell_alpha_curve(model, capacity, alphas, level);
      },
      py::arg("model"), py::arg("capacity"), py::arg("alphas"), py::arg("level"));
  m.def("ell_crossing_alpha", &ell_crossing_alpha, py::arg("model"), py::arg("capacity"),
        py::arg("tolerance") = 1e-8);
  m.def("tap_solution", &tap_solution, py::arg("ell"), py::arg("capacity"), py::arg("length"));
  m.def(
      "tap_objective", [](double ell, const std::vector<double>& rates) { return tap_objective(ell, rates); },
      py::arg("ell"), py::arg("rates"));
  m.def("tap_optimal_value", &tap_optimal_value, py::arg("ell"), py::arg("capacity"));
  m.def("sqrt_rho_heuristic", &sqrt_rho_heuristic, py::arg("model"), py::arg("capacity"), py::arg("length"));

  py::class_<OptimizationResult>(m, "OptimizationResult")
      .def_readonly("allocation", &OptimizationResult::allocation)
      .def_property_readonly("objective_value", [](const OptimizationResult& r) { return extended(r.objective_value); })
      .def_property_readonly("residual", [](const OptimizationResult& r) { return extended(r.residual); })
      .def_readonly("sweeps", &OptimizationResult::sweeps)
      .def_readonly("trace", &OptimizationResult::trace)
      .def_readonly("metrics", &OptimizationResult::metrics);

  m.def(
      "optimize_allocation",
      [](const ArrivalModel& model, double capacity, std::size_t horizon, std::size_t restarts,
         std::size_t max_sweeps, std::uint64_t seed, std::optional<double> deadline) {
        OptimizerConfig config;
        config.horizon = horizon;
        config.restarts = restarts;
        config.max_sweeps = max_sweeps;
        config.seed = seed;
        if (deadline) config.objective = Objective::deadline(*deadline);
        py::gil_scoped_release release;
        return optimize_allocation(model, capacity, config);
      },
      py::arg("model"), py::arg("capacity") = 1.0, py::arg("horizon") = 15, py::arg("restarts") = 3,
      py::arg("max_sweeps") = 50, py::arg("seed") = 1, py::arg("deadline") = py::none());

  py::class_<SimResult>(m, "SimResult")
      .def_readonly("recorded", &SimResult::recorded)
      .def_readonly("p_hat", &SimResult::p_hat)
      .def_readonly("p_se", &SimResult::p_se)
      .def_readonly("q_hat", &SimResult::q_hat)
      .def_readonly("delay_mean", &SimResult::delay_mean)
      .def_readonly("delay_se", &SimResult::delay_se)
      .def_readonly("served", &SimResult::served)
      .def_readonly("blocked", &SimResult::blocked)
      .def_readonly("overflow_mean", &SimResult::overflow_mean);

  m.def(
      "simulate",
      [](const ArrivalModel& model, const std::vector<double>& rates, std::uint64_t arrivals, std::uint64_t warmup,
         std::uint64_t seed, std::size_t batches) {
        SimConfig config{model, rates, arrivals, warmup, seed, batches};
        py::gil_scoped_release release;
        return simulate(config);
      },
      py::arg("model"), py::arg("rates"), py::arg("arrivals") = 1'000'000, py::arg("warmup") = 10'000,
      py::arg("seed") = 1, py::arg("batches") = 50);

  m.def(
      "run_experiment",
      [](const std::string& config_text, std::optional<std::string> out) {
        RunOverrides overrides;
        if (out) overrides.out = *out;
        std::ostringstream report, errors;
        const int code = run_experiment(ExperimentConfig::parse(config_text), overrides, report, errors);
        return py::make_tuple(code, report.str(), errors.str());
      },
      py::arg("config_text"), py::arg("out") = py::none(),
      "Runs one experiment from config text; returns (exit_code, report, errors).");
}
