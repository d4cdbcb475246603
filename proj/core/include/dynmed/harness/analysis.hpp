#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>

#include <Eigen/Dense>

#include "dynmed/dag_learn.hpp"
#include "dynmed/harness/bootstrap.hpp"
#include "dynmed/model.hpp"
#include "dynmed/panel.hpp"

namespace dynmed {

struct AnalysisOptions {
  DagLearnConfig dag;
  int bootstrap_reps = 0;
  std::uint64_t seed = 1;
  int spline_df = 6;
  bool standardize = false;
  int threads = 1;
};

// Finite-horizon analysis of an observed panel. Trajectory matrices are
// T x d; the smoothed ones are natural spline fits over the stage index.
struct AnalysisResult {
  MediationReport report;
  Eigen::MatrixXd immediate;  // theta_{A_t -> M_tj}
  Eigen::MatrixXd delayed;    // sum_{s<t} theta_{A_s -> M_tj}
  Eigen::MatrixXd eta_smooth;
  Eigen::MatrixXd iime_smooth;
  Eigen::MatrixXd dime_smooth;
  Eigen::MatrixXd immediate_smooth;
  Eigen::MatrixXd delayed_smooth;
  std::optional<BootstrapResult> bootstrap;
};

AnalysisResult analyze_real(const Panel& panel, const AnalysisOptions& opt);

// t,mediator,eta,iime,dime,se_eta with 1-based t and mediator. se_eta is
// left empty without bootstrap; an infinite-horizon report uses t = inf.
void write_analysis_csv(std::ostream& out, const MediationReport& report);

// Every trajectory of an analysis, raw and smoothed, as JSON.
void write_analysis_json(std::ostream& out, const AnalysisResult& result);

// Synthetic stand-in for a weekly mobile-health cohort: n subjects, T weeks,
// d mediators, random DAG, time-varying parameters with damped carryover.
Panel ihs_like_panel(std::uint64_t seed, int n = 1196, int T = 26, int d = 4);

}  // namespace dynmed
