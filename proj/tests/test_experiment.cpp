#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ordcap/errors.hpp"
#include "ordcap/experiment.hpp"
#include "ordcap/table.hpp"
#include "test_main.hpp"

using namespace ordcap;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ordcap_test_experiment_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(const std::string& text, const fs::path& out, std::string* errors = nullptr) {
  std::ostringstream report, err;
  const int code = run_experiment(ExperimentConfig::parse(text), {out, std::nullopt}, report, err);
  if (errors) *errors = err.str();
  return code;
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = ExperimentConfig::parse(
      "mode = metrics  # trailing comment\n"
      "; full-line comment\n"
      "[arrival]\n"
      "lambda = 0.2\n"
      "k=2\n"
      "[allocation]\n"
      "rates = 0.5, 0.25,0.1\n");
  CHECK(c.text("mode") == "metrics");
  CHECK(c.number("arrival.lambda") == 0.2);
  CHECK(c.number("arrival.k") == 2.0);
  CHECK(c.numbers("allocation.rates", {}) == std::vector<double>{0.5, 0.25, 0.1});
  CHECK(c.number("system.mu", 1.0) == 1.0);
  CHECK_THROWS_AS(c.number("system.mu"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("x = abc\n").number("x"), ConfigError);
  CHECK_THROWS_AS(parse_mode("nonsense"), ConfigError);
  for (Mode m : {Mode::Metrics, Mode::Feasibility, Mode::EllCurves, Mode::Tap, Mode::Optimize, Mode::Simulate,
                 Mode::PaperGrid}) {
    CHECK(parse_mode(to_string(m)) == m);
  }
}

TEST_CASE("tables") {
  Table empty{{"a", "b"}, {}};
  CHECK(render_csv(empty) == "a,b\n");
  CHECK(render_text(empty).find('\n') == render_text(empty).size() - 1);
  CHECK_THROWS_AS(empty.add_row({1.0}), InvariantError);

  Table t{{"x", "y"}, {}};
  t.add_row({1.0 / 3.0, -2.5e-17});
  t.add_row({std::numeric_limits<double>::infinity(), 42.0});
  const Table back = parse_csv(render_csv(t));
  CHECK(back.columns == t.columns);
  CHECK(render_csv(back) == render_csv(t));
  CHECK(back.rows[0][0] == approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(std::isinf(back.rows[1][0]));
  CHECK(format_number(std::nan(""), 6) == "nan");
  CHECK_THROWS_AS(parse_csv("a,b\n1\n"), ConfigError);
}

TEST_CASE("metrics mode") {
  const fs::path out = scratch("metrics");
  const std::string config =
      "mode = metrics\narrival.k = 1\narrival.lambda = 0.2\nallocation.kind = geometric\nallocation.alpha = 0.5\n";
  REQUIRE(run(config, out) == kExitOk);
  const Table t = parse_csv(slurp(out / "metrics.csv"));
  CHECK(t.rows.size() == 15);
  for (std::size_t i = 1; i < t.rows.size(); ++i) CHECK(t.rows[i][2] < t.rows[i - 1][2]);
  CHECK(fs::exists(out / "metrics_summary.csv"));
  const Table round = parse_csv(slurp(out / "metrics.csv"));
  CHECK(render_csv(round) == slurp(out / "metrics.csv"));
}

TEST_CASE("configuration errors exit with 1") {
  const fs::path out = scratch("errors");
  std::string errors;
  CHECK(run("mode = metrics\nallocation.alpha = 0.5\n", out, &errors) == kExitConfig);
  CHECK(errors.find("arrival.lambda") != std::string::npos);
  CHECK(run("mode = metrics\narrival.lambda = 0.2\nallocation.alpha = 0.5\nbogus.key = 1\n", out, &errors) ==
        kExitConfig);
  CHECK(errors.find("bogus.key") != std::string::npos);
  CHECK(run("mode = metrics\narrival.lambda = 0.2\nallocation.alpha = 1.5\n", out) == kExitConfig);
  CHECK(run("mode = optimize\narrival.lambda = 1.5\n", out) == kExitConfig);
}

TEST_CASE("other modes write their artifacts") {
  const fs::path out = scratch("modes");
  CHECK(run("mode = feasibility\narrival.lambda = 0.2\nallocation.alpha = 0.5\n", out) == kExitOk);
  CHECK(slurp(out / "feasibility.txt").find("feasibility: feasible") != std::string::npos);
  CHECK(run("mode = ell_curves\narrival.lambda = 0.2\ncurves.alphas = 0.2,0.5\ncurves.levels = 3\n", out) == kExitOk);
  CHECK(parse_csv(slurp(out / "fig1.csv")).rows.size() == 6);
  CHECK(run("mode = tap\n", out) == kExitOk);
  CHECK(parse_csv(slurp(out / "tap.csv")).rows.size() == 90);
  CHECK(run("mode = simulate\narrival.lambda = 0.2\nallocation.kind = explicit\nallocation.rates = 0.5\n"
            "allocation.M = 1\nsim.arrivals = 20000\nsim.warmup = 100\nsim.replications = 2\n",
            out) == kExitOk);
  CHECK(parse_csv(slurp(out / "simulate_compare.csv")).rows.size() == 1);
  CHECK(run("mode = optimize\narrival.lambda = 0.3\nopt.M = 4\nopt.restarts = 1\n", out) == kExitOk);
  CHECK(parse_csv(slurp(out / "optimize.csv")).rows.size() == 4);
}

TEST_CASE("paper grid shape") {
  const fs::path out = scratch("grid");
  const int code = run("mode = paper_grid\nopt.M = 3\nopt.restarts = 0\nopt.max_sweeps = 5\n", out);
  CHECK((code == kExitOk || code == kExitNumeric));
  const Table t = parse_csv(slurp(out / "table1.csv"));
  CHECK(t.rows.size() == 20);
  CHECK(parse_csv(slurp(out / "fig6.csv")).rows.size() == 3);
}

TEST_CASE("artifacts are byte-identical across runs") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const std::string config =
      "mode = simulate\narrival.k = 2\narrival.lambda = 0.4\nallocation.alpha = 0.4\nallocation.M = 4\n"
      "sim.arrivals = 30000\nsim.warmup = 100\nsim.seed = 17\n";
  REQUIRE(run(config, a) == kExitOk);
  REQUIRE(run(config, b) == kExitOk);
  for (const char* name : {"simulate.csv", "simulate_summary.csv", "simulate_compare.csv"}) {
    CHECK(slurp(a / name) == slurp(b / name));
  }
}
