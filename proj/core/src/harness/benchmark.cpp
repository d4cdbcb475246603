#include "dynmed/harness/benchmark.hpp"

#include <cmath>
#include <optional>
#include <ostream>

#include "dynmed/baselines.hpp"
#include "dynmed/effects_finite.hpp"
#include "dynmed/effects_infinite.hpp"
#include "dynmed/error.hpp"
#include "dynmed/harness/csv.hpp"
#include "dynmed/harness/parallel.hpp"
#include "dynmed/oracle.hpp"
#include "dynmed/rng.hpp"
#include "dynmed/simulator.hpp"

namespace dynmed {

std::string method_name(Method m) {
  switch (m) {
    case Method::proposed: return "proposed";
    case Method::independent_timepoints: return "independent-timepoints";
    case Method::independent_mediators: return "independent-mediators";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::proposed, Method::independent_timepoints,
                   Method::independent_mediators}) {
    if (method_name(m) == name) return m;
  }
  throw ValidationError("unknown method '" + name + "'");
}

BenchmarkRow summarize_errors(const std::vector<double>& errors) {
  BenchmarkRow row;
  const double k = static_cast<double>(errors.size());
  row.reps = static_cast<int>(errors.size());
  if (errors.empty()) {
    row.bias = row.se = row.rmse = std::nan("");
    return row;
  }
  double sum = 0.0, sumsq = 0.0;
  for (double e : errors) {
    sum += e;
    sumsq += e * e;
  }
  row.bias = sum / k;
  row.rmse = std::sqrt(sumsq / k);
  double ss = 0.0;
  for (double e : errors) ss += (e - row.bias) * (e - row.bias);
  row.se = errors.size() > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
  return row;
}

namespace {

MediationReport run_method(Method m, Horizon h, const Panel& panel,
                           const DagLearnConfig& dag) {
  if (h == Horizon::finite) {
    switch (m) {
      case Method::proposed: return estimate_finite(panel, dag);
      case Method::independent_timepoints: return estimate_independent_timepoints(panel, dag);
      case Method::independent_mediators: return estimate_independent_mediators(panel);
    }
  } else {
    switch (m) {
      case Method::proposed: return estimate_infinite(panel, dag);
      case Method::independent_timepoints:
        return estimate_independent_timepoints_infinite(panel, dag);
      case Method::independent_mediators: return estimate_independent_mediators_infinite(panel);
    }
  }
  throw ValidationError("unknown method");
}

}  // namespace

BenchmarkOutput run_benchmark(const BenchmarkConfig& cfg) {
  if (cfg.reps < 1) throw ValidationError("benchmark needs reps >= 1");
  if (cfg.grid.empty()) throw ValidationError("benchmark grid is empty");
  if (cfg.methods.empty()) throw ValidationError("benchmark needs at least one method");
  const int d = 3;
  const int M = static_cast<int>(cfg.methods.size());

  BenchmarkOutput out;
  for (std::size_t cell = 0; cell < cfg.grid.size(); ++cell) {
    const auto [n, T] = cfg.grid[cell];
    SimConfig sim;
    sim.n = n;
    sim.T = T;
    sim.d = d;
    sim.noise_sd_mediator = sim.noise_sd_outcome = cfg.noise_sd;
    Eigen::VectorXd truth;
    if (cfg.horizon == Horizon::finite) {
      sim.params = finite_setting(T, cfg.param_seed);
      truth = true_report_finite(sim.params, T).eta.row(T - 1).transpose();
    } else {
      sim.params = {stationary_setting(cfg.param_seed)};
      sim.burn_in = cfg.burn_in;
      truth = true_eta_infinite(sim.params.front());
    }
    sim.validate();

    // est[r][m] = estimate row or empty on failure
    std::vector<std::vector<std::optional<Eigen::VectorXd>>> est(
        cfg.reps, std::vector<std::optional<Eigen::VectorXd>>(M));
    std::vector<std::vector<std::string>> why(cfg.reps, std::vector<std::string>(M));
    parallel_for(cfg.reps, cfg.threads, [&](int r) {
      SimConfig local = sim;
      local.seed = derive_seed(cfg.seed, cell, static_cast<std::uint64_t>(r));
      const Panel panel = simulate(local);
      for (int m = 0; m < M; ++m) {
        try {
          const MediationReport rep = run_method(cfg.methods[m], cfg.horizon, panel, cfg.dag);
          est[r][m] = rep.eta.row(rep.stages() - 1).transpose();
        } catch (const Error& e) {
          why[r][m] = e.what();
        }
      }
    });

    for (int m = 0; m < M; ++m) {
      for (int j = 0; j < d; ++j) {
        std::vector<double> errors;
        for (int r = 0; r < cfg.reps; ++r) {
          if (est[r][m]) errors.push_back((*est[r][m])(j) - truth(j));
        }
        BenchmarkRow row = summarize_errors(errors);
        row.method = method_name(cfg.methods[m]);
        row.n = n;
        row.T = T;
        row.mediator = j + 1;
        row.seed = cfg.seed;
        out.rows.push_back(row);
        out.errors.push_back(std::move(errors));
      }
      for (int r = 0; r < cfg.reps; ++r) {
        if (!est[r][m]) {
          out.failures.push_back(method_name(cfg.methods[m]) + " n=" + std::to_string(n) +
                                 " T=" + std::to_string(T) + " rep " + std::to_string(r) +
                                 ": " + why[r][m]);
        }
      }
    }
  }
  return out;
}

void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows) {
  out << "method,n,T,mediator,bias,se,rmse,reps,seed\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.n << ',' << r.T << ',' << r.mediator << ','
        << format_double(r.bias) << ',' << format_double(r.se) << ','
        << format_double(r.rmse) << ',' << r.reps << ',' << r.seed << '\n';
  }
}

}  // namespace dynmed
