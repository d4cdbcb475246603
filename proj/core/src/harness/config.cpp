#include "dynmed/harness/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dynmed/error.hpp"

namespace dynmed {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

long long to_int(const std::string& key, const std::string& s) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("config key '" + key + "' is not an integer: '" + s + "'");
  }
  return v;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(lineno, "empty key");
    if (cfg.values_.count(key)) throw ParseError(lineno, "key '" + key + "' repeated");
    cfg.values_[key] = value;
    cfg.lines_[key] = lineno;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  return parse(in);
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  double v = 0.0;
  const std::string& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("config key '" + key + "' is not a number: '" + s + "'");
  }
  return v;
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return to_int(key, it->second);
}

std::uint64_t KeyValueConfig::get_uint64(const std::string& key,
                                         std::uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::uint64_t v = 0;
  const std::string& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("config key '" + key + "' is not an unsigned integer: '" + s + "'");
  }
  return v;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& s = it->second;
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ValidationError("config key '" + key + "' is not a boolean: '" + s + "'");
}

void KeyValueConfig::require_known(const std::set<std::string>& known) const {
  for (const auto& [k, v] : values_) {
    if (!known.count(k)) {
      auto line = lines_.find(k);
      if (line != lines_.end()) throw ParseError(line->second, "unknown key '" + k + "'");
      throw ValidationError("unknown config key '" + k + "'");
    }
  }
}

const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys{
      "input", "output", "seed", "threads", "reps", "bootstrap", "spline_df",
      "standardize", "setting", "param_seed", "time_varying", "n", "T", "d",
      "treatment", "treatment_prob", "noise", "noise_sd_mediator", "noise_sd_outcome",
      "burn_in", "initial_value", "l1_penalty", "weight_threshold", "max_iterations",
      "convergence_tol", "known_order", "horizon", "grid", "methods", "rollouts",
      "mediator_value"};
  return keys;
}

Mode parse_mode(const std::string& s) {
  if (s == "simulate") return Mode::simulate;
  if (s == "estimate-finite") return Mode::estimate_finite;
  if (s == "estimate-infinite") return Mode::estimate_infinite;
  if (s == "benchmark") return Mode::benchmark;
  if (s == "oracle") return Mode::oracle;
  if (s == "analyze") return Mode::analyze;
  throw ValidationError("unknown mode '" + s + "'");
}

AnalysisConfig load_config(const KeyValueConfig& kv, Mode mode) {
  kv.require_known(known_config_keys());
  AnalysisConfig c;
  c.mode = mode;
  c.input_path = kv.get_string("input", "");
  c.output_path = kv.get_string("output", "");
  c.seed = kv.get_uint64("seed", 1);
  c.threads = static_cast<int>(kv.get_int("threads", 1));
  c.reps = static_cast<int>(kv.get_int("reps", 100));
  c.bootstrap_reps = static_cast<int>(kv.get_int("bootstrap", 0));
  c.spline_df = static_cast<int>(kv.get_int("spline_df", 6));
  c.standardize = kv.get_bool("standardize", false);

  const std::string setting = kv.get_string("setting", "finite");
  if (setting == "finite") c.setting = Setting::finite;
  else if (setting == "stationary") c.setting = Setting::stationary;
  else if (setting == "random") c.setting = Setting::random;
  else throw ValidationError("setting must be finite, stationary or random");
  c.param_seed = kv.get_uint64("param_seed", 2024);
  c.time_varying = kv.get_bool("time_varying", true);

  c.sim.n = static_cast<int>(kv.get_int("n", 500));
  c.sim.T = static_cast<int>(kv.get_int("T", 10));
  c.sim.d = static_cast<int>(kv.get_int("d", 3));
  const std::string treatment = kv.get_string("treatment", "bernoulli");
  if (treatment == "bernoulli") c.sim.treatment = TreatmentKind::bernoulli;
  else if (treatment == "gaussian") c.sim.treatment = TreatmentKind::gaussian;
  else throw ValidationError("treatment must be bernoulli or gaussian");
  c.sim.treatment_prob = kv.get_double("treatment_prob", 0.5);
  const std::string noise = kv.get_string("noise", "normal");
  if (noise == "normal") c.sim.noise = NoiseKind::normal;
  else if (noise == "uniform") c.sim.noise = NoiseKind::uniform;
  else throw ValidationError("noise must be normal or uniform");
  c.sim.noise_sd_mediator = kv.get_double("noise_sd_mediator", 1.0);
  c.sim.noise_sd_outcome = kv.get_double("noise_sd_outcome", 1.0);
  c.sim.initial_value = kv.get_double("initial_value", 0.0);
  c.sim.burn_in = static_cast<int>(
      kv.get_int("burn_in", c.setting == Setting::stationary ? 5 : 0));

  c.dag.l1_penalty = kv.get_double("l1_penalty", c.dag.l1_penalty);
  c.dag.weight_threshold = kv.get_double("weight_threshold", c.dag.weight_threshold);
  c.dag.max_iterations = static_cast<int>(kv.get_int("max_iterations", c.dag.max_iterations));
  c.dag.convergence_tol = kv.get_double("convergence_tol", c.dag.convergence_tol);
  if (kv.has("known_order")) {
    std::vector<int> order;
    for (const auto& item : split_list(kv.get_string("known_order", ""))) {
      order.push_back(static_cast<int>(to_int("known_order", item)) - 1);
    }
    c.dag.known_order = order;
  }

  const std::string horizon =
      kv.get_string("horizon", mode == Mode::estimate_infinite ? "infinite" : "finite");
  if (horizon == "finite") c.horizon = Horizon::finite;
  else if (horizon == "infinite") c.horizon = Horizon::infinite;
  else throw ValidationError("horizon must be finite or infinite");
  if (mode == Mode::estimate_infinite) c.horizon = Horizon::infinite;
  if (mode == Mode::estimate_finite) c.horizon = Horizon::finite;

  if (kv.has("grid")) {
    for (const auto& cell : split_list(kv.get_string("grid", ""))) {
      const auto x = cell.find('x');
      if (x == std::string::npos) throw ValidationError("grid cells look like 100x10");
      c.grid.emplace_back(static_cast<int>(to_int("grid", trim(cell.substr(0, x)))),
                          static_cast<int>(to_int("grid", trim(cell.substr(x + 1)))));
    }
  }
  if (kv.has("methods")) {
    c.methods.clear();
    for (const auto& m : split_list(kv.get_string("methods", ""))) {
      c.methods.push_back(parse_method(m));
    }
  }
  c.rollouts = static_cast<long>(kv.get_int("rollouts", 0));
  c.mediator_value = kv.get_double("mediator_value", 0.0);
  return c;
}

void AnalysisConfig::validate() const {
  if (threads < 1) throw ValidationError("threads must be >= 1");
  if (reps < 1) throw ValidationError("reps must be >= 1");
  if (bootstrap_reps < 0 || bootstrap_reps == 1) {
    throw ValidationError("bootstrap must be 0 or >= 2");
  }
  if (spline_df < 2) throw ValidationError("spline_df must be >= 2");
  if (rollouts < 0) throw ValidationError("rollouts must be >= 0");
  dag.validate(sim.d);
  if (setting != Setting::random && sim.d != 3) {
    throw ValidationError("the reference designs have d = 3");
  }
  switch (mode) {
    case Mode::estimate_finite:
    case Mode::estimate_infinite:
      if (input_path.empty()) throw ValidationError("an input panel is required");
      break;
    case Mode::simulate:
    case Mode::oracle:
      if (sim.n < 1 || sim.T < 1 || sim.d < 1) throw ValidationError("n, T, d must be >= 1");
      break;
    case Mode::benchmark:
      if (grid.empty()) throw ValidationError("benchmark needs a grid, e.g. grid = 100x10,500x10");
      for (auto [n, T] : grid)
        if (n < 1 || T < 1) throw ValidationError("grid cells need n, T >= 1");
      if (methods.empty()) throw ValidationError("benchmark needs at least one method");
      break;
    case Mode::analyze:
      break;
  }
}

std::vector<SemParams> setting_params(const AnalysisConfig& cfg) {
  switch (cfg.setting) {
    case Setting::finite: return finite_setting(cfg.sim.T, cfg.param_seed);
    case Setting::stationary: return {stationary_setting(cfg.param_seed)};
    case Setting::random:
      return sample_params(cfg.sim.d, cfg.sim.T, cfg.time_varying, cfg.param_seed);
  }
  return {};
}

}  // namespace dynmed
