#pragma once

#include <Eigen/Dense>

#include "dynmed/dag_learn.hpp"
#include "dynmed/model.hpp"
#include "dynmed/panel.hpp"
#include "dynmed/regress.hpp"

namespace dynmed {

// Long-run quantities of a time-invariant model. B2(j), B3(j), B4(j), B5(j)
// are the j-th entries of the per-mediator solves.
struct StationaryQuantities {
  Eigen::VectorXd B1;
  Eigen::VectorXd B2;
  Eigen::VectorXd B3;
  Eigen::VectorXd B4;
  Eigen::VectorXd B5;
  Eigen::MatrixXd B6;
  Eigen::MatrixXd B7;
  Eigen::MatrixXd theta_M_to_M1;
  Eigen::VectorXd theta_M_to_R1;
  // Condition numbers of the two linear systems.
  double cond_b1 = 0.0;
  double cond_b2 = 0.0;
};

struct StationarityGuard {
  // Spectral radius of the one-step transition must stay below 1 - margin.
  double margin = 1e-3;
  double max_condition = 1e10;
};

// Throws NonStationaryModel when the process is not stationary or either
// system is ill-conditioned.
StationaryQuantities stationary_quantities(const SemParams& params,
                                           const WithinStage& within,
                                           const StationarityGuard& guard = {});

// Long-run individual mediation effect per mediator.
Eigen::VectorXd eta_infinite(const StationaryQuantities& q);

// Single-row infinite-horizon report; iime is the stationary within-stage
// product and dime the remainder.
MediationReport infinite_report(const SemParams& params, const WithinStage& within,
                                const StationarityGuard& guard = {});

struct InfiniteOptions {
  DagLearnConfig dag;
  WithinStageOptions within;
  // 0 adds the first stage (constant history) to the pooled regressions.
  int first_stage = 1;
  StationarityGuard guard;
};

struct InfiniteFit {
  DagStructure dag;
  SemParams params;
  WithinStage within;
  StationaryQuantities quantities;
  MediationReport report;
};

InfiniteFit fit_infinite(const Panel& panel, const InfiniteOptions& opt);
MediationReport estimate_infinite(const Panel& panel, const DagLearnConfig& cfg = {});

}  // namespace dynmed
