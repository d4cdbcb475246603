#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dynmed/dag_learn.hpp"
#include "dynmed/model.hpp"

namespace dynmed {

enum class Method { proposed, independent_timepoints, independent_mediators };

// "proposed", "independent-timepoints", "independent-mediators"
std::string method_name(Method m);
Method parse_method(const std::string& name);

struct BenchmarkRow {
  std::string method;
  int n = 0;
  int T = 0;
  int mediator = 0;  // 1-based
  double bias = 0.0;
  double se = 0.0;
  double rmse = 0.0;
  int reps = 0;
  std::uint64_t seed = 0;
};

// bias = mean error, se = sample standard deviation (n - 1), rmse = root mean
// squared error, so rmse^2 = bias^2 + se^2 (reps - 1) / reps. With a single
// error se is 0.
BenchmarkRow summarize_errors(const std::vector<double>& errors);

struct BenchmarkConfig {
  Horizon horizon = Horizon::finite;
  std::vector<std::pair<int, int>> grid;  // (n, T)
  std::vector<Method> methods{Method::proposed, Method::independent_timepoints,
                              Method::independent_mediators};
  int reps = 100;
  std::uint64_t seed = 1;
  // Seed of the generating parameters (finite or stationary reference design).
  std::uint64_t param_seed = 2024;
  int threads = 1;
  // Stages discarded before recording in the infinite-horizon design.
  int burn_in = 5;
  double noise_sd = 1.0;
  DagLearnConfig dag;
};

struct BenchmarkOutput {
  std::vector<BenchmarkRow> rows;
  // Raw estimation errors per row, replication order.
  std::vector<std::vector<double>> errors;
  // One message per failed (method, cell, replication).
  std::vector<std::string> failures;
};

// Simulate, estimate with every method on the same panel, compare with the
// exact truth (final-stage eta for a finite horizon, the long-run limit for
// an infinite one). Failed replications are recorded and skipped.
BenchmarkOutput run_benchmark(const BenchmarkConfig& cfg);

// method,n,T,mediator,bias,se,rmse,reps,seed
void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows);

}  // namespace dynmed
