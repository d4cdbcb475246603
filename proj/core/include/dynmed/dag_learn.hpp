#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dynmed/dag.hpp"
#include "dynmed/panel.hpp"

namespace dynmed {

struct DagLearnConfig {
  double l1_penalty = 0.03;
  // Edges weaker than this are dropped; edges of interest are >= 0.5 in size.
  double weight_threshold = 0.3;
  // Proximal gradient steps per barrier stage.
  int max_iterations = 20000;
  double convergence_tol = 1e-6;
  // Skip the search and regress each node on its predecessors in this order.
  std::optional<std::vector<int>> known_order;
  // Force the edgeless graph (used by the independent-mediator baseline).
  bool empty = false;

  // Throws ValidationError.
  void validate(int d) const;
};

// M_t minus its OLS fit on (1, A_t, M_{t-1}, R_{t-1}); stage 0, or
// adjust_history = false, uses (1, A_t) only. Returns n x d.
Eigen::MatrixXd residualize(const Panel& panel, int stage, bool adjust_history = true);

// Residuals of the stacked regression over stages first_stage..T-1.
Eigen::MatrixXd residualize_pooled(const Panel& panel, int first_stage = 1);

// Least-squares score with a log-det acyclicity barrier, followed by hard
// thresholding, cycle breaking (weakest edge on a cycle goes first) and an
// OLS refit of every node on its selected parents. Throws NonConvergence when
// the last barrier stage runs out of iterations still far from a DAG.
DagStructure learn_dag(const Eigen::MatrixXd& residuals, const DagLearnConfig& cfg);

// Value of the log-det acyclicity function h_s(W); zero exactly on DAGs.
double logdet_acyclicity(const Eigen::MatrixXd& w, double s = 1.0);

}  // namespace dynmed
