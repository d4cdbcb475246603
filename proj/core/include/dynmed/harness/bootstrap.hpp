#pragma once

#include <cstdint>
#include <functional>

#include "dynmed/model.hpp"
#include "dynmed/panel.hpp"

namespace dynmed {

using Estimator = std::function<MediationReport(const Panel&)>;

struct BootstrapResult {
  ReportArrays se;
  ReportArrays lower;
  ReportArrays upper;
  int reps = 0;
  int failures = 0;
};

// Nonparametric bootstrap over whole subject trajectories. Replicate r
// resamples subjects with a stream derived from (seed, r), so the result is
// the same for any thread count. Replicates whose estimator throws a library
// Error are dropped; more than 10% of them failing raises BootstrapFailure.
// SEs are sample standard deviations, intervals are percentile intervals.
BootstrapResult bootstrap(const Panel& panel, const Estimator& estimator, int reps,
                          std::uint64_t seed, int threads = 1, double level = 0.95);

inline ReportArrays bootstrap_se(const Panel& panel, const Estimator& estimator,
                                 int reps, std::uint64_t seed, int threads = 1) {
  return bootstrap(panel, estimator, reps, seed, threads).se;
}

}  // namespace dynmed
