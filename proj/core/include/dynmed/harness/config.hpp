#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dynmed/dag_learn.hpp"
#include "dynmed/harness/benchmark.hpp"
#include "dynmed/simulator.hpp"

namespace dynmed {

// Flat "key = value" text, one pair per line. '#' starts a comment, blank
// lines are ignored, a repeated key is an error.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig from_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Throws ValidationError naming the first key not in `known`.
  void require_known(const std::set<std::string>& known) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, std::size_t> lines_;
};

enum class Mode { simulate, estimate_finite, estimate_infinite, benchmark, oracle, analyze };

// Synthetic designs the simulator can draw from.
enum class Setting {
  finite,      // reference W, Theta per stage
  stationary,  // reference W, one Theta
  random,      // random W and Theta (d from config)
};

struct AnalysisConfig {
  Mode mode = Mode::analyze;
  std::string input_path;
  std::string output_path;
  std::uint64_t seed = 1;
  int threads = 1;
  int reps = 100;
  int bootstrap_reps = 0;
  int spline_df = 6;
  bool standardize = false;

  Setting setting = Setting::finite;
  std::uint64_t param_seed = 2024;
  bool time_varying = true;  // random setting only
  SimConfig sim;
  DagLearnConfig dag;

  Horizon horizon = Horizon::finite;
  std::vector<std::pair<int, int>> grid;
  std::vector<Method> methods{Method::proposed, Method::independent_timepoints,
                              Method::independent_mediators};
  long rollouts = 0;  // oracle Monte Carlo; 0 skips it
  double mediator_value = 0.0;

  // Throws ValidationError when a field is out of range or a mode-required
  // field is missing.
  void validate() const;
};

// Every key load_config understands.
const std::set<std::string>& known_config_keys();

AnalysisConfig load_config(const KeyValueConfig& kv, Mode mode);

// Parameters of the configured synthetic design.
std::vector<SemParams> setting_params(const AnalysisConfig& cfg);

Mode parse_mode(const std::string& s);

}  // namespace dynmed
