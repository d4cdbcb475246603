// dynmed: simulate panels, estimate dynamic mediation effects, run benchmarks.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "dynmed/effects_finite.hpp"
#include "dynmed/effects_infinite.hpp"
#include "dynmed/error.hpp"
#include "dynmed/harness/analysis.hpp"
#include "dynmed/harness/benchmark.hpp"
#include "dynmed/harness/bootstrap.hpp"
#include "dynmed/harness/config.hpp"
#include "dynmed/harness/csv.hpp"
#include "dynmed/oracle.hpp"
#include "dynmed/simulator.hpp"

namespace {

using namespace dynmed;

constexpr int kValidation = 2;
constexpr int kNumerical = 3;

struct Flags {
  std::string config;
  std::string input;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> reps;
  std::optional<int> threads;
  std::optional<int> bootstrap;
  bool standardize = false;
  std::optional<int> spline_df;
};

// Writes to `path`, or stdout when it is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") {
      stream_ = &std::cout;
    } else {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ValidationError("cannot write '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

AnalysisConfig resolve(Mode mode, const Flags& f) {
  KeyValueConfig kv;
  if (!f.config.empty()) kv = KeyValueConfig::from_file(f.config);
  AnalysisConfig c = load_config(kv, mode);
  if (!f.input.empty()) c.input_path = f.input;
  if (f.seed) c.seed = *f.seed;
  if (f.out) c.output_path = *f.out;
  if (f.reps) c.reps = *f.reps;
  if (f.threads) c.threads = *f.threads;
  if (f.bootstrap) c.bootstrap_reps = *f.bootstrap;
  if (f.standardize) c.standardize = true;
  if (f.spline_df) c.spline_df = *f.spline_df;
  c.validate();
  return c;
}

Panel load_input(const AnalysisConfig& c) {
  Panel p = read_panel_csv(c.input_path);
  return c.standardize ? p.standardized() : p;
}

void run_simulate(const AnalysisConfig& c) {
  SimConfig sim = c.sim;
  sim.params = setting_params(c);
  sim.seed = c.seed;
  const Panel p = simulate(sim);
  Output out(c.output_path);
  write_panel_csv(*out, p);
}

void run_estimate(const AnalysisConfig& c) {
  const Panel panel = load_input(c);
  MediationReport rep;
  if (c.horizon == Horizon::finite) {
    rep = estimate_finite(panel, c.dag);
  } else {
    rep = estimate_infinite(panel, c.dag);
  }
  if (c.bootstrap_reps > 0) {
    const DagLearnConfig dag = c.dag;
    const Horizon h = c.horizon;
    rep.bootstrap_se = bootstrap_se(
        panel,
        [dag, h](const Panel& p) {
          return h == Horizon::finite ? estimate_finite(p, dag) : estimate_infinite(p, dag);
        },
        c.bootstrap_reps, c.seed, c.threads);
  }
  Output out(c.output_path);
  write_analysis_csv(*out, rep);
}

void run_benchmark_mode(const AnalysisConfig& c) {
  BenchmarkConfig b;
  b.horizon = c.horizon;
  b.grid = c.grid;
  b.methods = c.methods;
  b.reps = c.reps;
  b.seed = c.seed;
  b.param_seed = c.param_seed;
  b.threads = c.threads;
  b.burn_in = c.horizon == Horizon::infinite ? std::max(c.sim.burn_in, 0) : 0;
  b.dag = c.dag;
  const BenchmarkOutput res = run_benchmark(b);
  for (const auto& f : res.failures) std::cerr << "warning: " << f << '\n';
  Output out(c.output_path);
  write_benchmark_csv(*out, res.rows);
}

void run_oracle(const AnalysisConfig& c) {
  const std::vector<SemParams> params = setting_params(c);
  Output out(c.output_path);
  *out << "t,mediator,eta,iime,dime,mc_eta,mc_se\n";
  if (c.horizon == Horizon::infinite) {
    if (params.size() != 1) throw ValidationError("the long-run truth needs a single parameter set");
    const MediationReport rep = infinite_report(params.front(), analytic_within_stage(params.front()));
    for (int j = 0; j < rep.d(); ++j) {
      *out << "inf," << j + 1 << ',' << format_double(rep.eta(0, j)) << ','
           << format_double(rep.iime(0, j)) << ',' << format_double(rep.dime(0, j)) << ",,\n";
    }
    return;
  }
  const int T = c.sim.T;
  const MediationReport rep = true_report_finite(params, T);
  std::optional<McEstimate> mc;
  if (c.rollouts > 0) {
    McOptions opt;
    opt.rollouts = c.rollouts;
    opt.seed = c.seed;
    opt.mediator_value = c.mediator_value;
    mc = mc_eta_all(params, T, opt);
  }
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < rep.d(); ++j) {
      *out << t + 1 << ',' << j + 1 << ',' << format_double(rep.eta(t, j)) << ','
           << format_double(rep.iime(t, j)) << ',' << format_double(rep.dime(t, j)) << ',';
      if (mc) *out << format_double(mc->estimate(t, j)) << ',' << format_double(mc->mc_se(t, j));
      else *out << ',';
      *out << '\n';
    }
  }
}

void run_analyze(const AnalysisConfig& c) {
  // No input: analyze the synthetic weekly cohort.
  const Panel panel = c.input_path.empty() ? ihs_like_panel(c.seed) : read_panel_csv(c.input_path);
  AnalysisOptions opt;
  opt.dag = c.dag;
  opt.bootstrap_reps = c.bootstrap_reps;
  opt.seed = c.seed;
  opt.spline_df = c.spline_df;
  opt.standardize = c.standardize;
  opt.threads = c.threads;
  const AnalysisResult res = analyze_real(panel, opt);
  {
    Output out(c.output_path);
    write_analysis_csv(*out, res.report);
  }
  if (!c.output_path.empty() && c.output_path != "-") {
    std::string json = c.output_path;
    const auto dot = json.find_last_of('.');
    const auto slash = json.find_last_of('/');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) json.erase(dot);
    json += ".json";
    Output out(json);
    write_analysis_json(*out, res);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic mediation analysis with multiple mediators"};
  app.require_subcommand(1);
  Flags flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "key = value configuration file");
    sub->add_option("--seed", flags.seed, "root random seed");
    sub->add_option("--out", flags.out, "output file (default: stdout)");
    sub->add_option("--reps", flags.reps, "benchmark replications");
    sub->add_option("--threads", flags.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--bootstrap", flags.bootstrap, "bootstrap replicates (0 = none)");
    sub->add_flag("--standardize", flags.standardize, "z-score mediators and outcome first");
    sub->add_option("--spline-df", flags.spline_df, "natural spline degrees of freedom");
  };

  struct Sub {
    const char* name;
    const char* help;
    Mode mode;
    bool takes_input;
  };
  const Sub subs[] = {
      {"simulate", "simulate a panel from a synthetic design", Mode::simulate, false},
      {"estimate-finite", "finite-horizon effects of a panel CSV", Mode::estimate_finite, true},
      {"estimate-infinite", "long-run effects of a panel CSV", Mode::estimate_infinite, true},
      {"benchmark", "bias/SE/RMSE over replications", Mode::benchmark, false},
      {"oracle", "exact (and Monte Carlo) true effects of a design", Mode::oracle, false},
      {"analyze", "trajectories, smoothing and bootstrap for a panel", Mode::analyze, true},
  };
  std::vector<std::pair<CLI::App*, const Sub*>> handles;
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub);
    if (s.takes_input) sub->add_option("input", flags.input, "panel CSV (id,t,A,M1..Md,R)");
    handles.emplace_back(sub, &s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    for (auto [sub, s] : handles) {
      if (!sub->parsed()) continue;
      const AnalysisConfig c = resolve(s->mode, flags);
      switch (s->mode) {
        case Mode::simulate: run_simulate(c); break;
        case Mode::estimate_finite:
        case Mode::estimate_infinite: run_estimate(c); break;
        case Mode::benchmark: run_benchmark_mode(c); break;
        case Mode::oracle: run_oracle(c); break;
        case Mode::analyze: run_analyze(c); break;
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.category() == ErrorCategory::validation ? kValidation : kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
