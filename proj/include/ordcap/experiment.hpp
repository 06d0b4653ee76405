#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ordcap {

/// Flat key = value configuration. `[section]` lines prefix the keys that follow with
/// "section."; '#' and ';' start comments.
class ExperimentConfig {
 public:
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  /// Typed accessors; ConfigError names the key on a missing or malformed value.
  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  std::size_t count(const std::string& key, std::size_t fallback) const;
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;

 private:
  std::map<std::string, std::string> values_;
};

enum class Mode { Metrics, Feasibility, EllCurves, Tap, Optimize, Simulate, PaperGrid };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& name);

/// Every key the runner understands. Anything else is a config error.
const std::vector<std::string>& known_config_keys();

struct RunOverrides {
  std::optional<std::filesystem::path> out;
  std::optional<std::size_t> workers;
};

/// Exit status of run_experiment.
enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumeric = 2 };

/// Dispatches on `mode`, writes the mode's CSV artifacts under the output directory and a
/// human-readable summary to `report`. Errors are reported on `errors` and mapped to exit codes:
/// configuration problems give 1, numeric failures give 2.
int run_experiment(const ExperimentConfig& config, const RunOverrides& overrides, std::ostream& report,
                   std::ostream& errors);

}  // namespace ordcap
