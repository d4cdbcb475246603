#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dynmed/dag.hpp"
#include "dynmed/model.hpp"
#include "dynmed/panel.hpp"

namespace dynmed {

struct OlsFit {
  // Intercept first when one was requested.
  Eigen::VectorXd coefficients;
  double residual_variance = 0.0;  // RSS / (n - p)
  int design_rank = 0;
  int n_used = 0;
};

// Column-pivoted QR of a fixed design, reusable across responses. Columns
// are scaled to unit norm before factorizing so the rank threshold is
// relative to each column's own size. Throws RankDeficient listing the
// offending design columns (0 is the intercept when one is included).
class LeastSquares {
 public:
  static constexpr double kRankThreshold = 1e-10;

  LeastSquares(const Eigen::MatrixXd& X, bool intercept);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& y) const;
  OlsFit fit(const Eigen::VectorXd& y) const;

 private:
  int rows_;
  int cols_;
  bool intercept_;
  Eigen::VectorXd scale_;
  Eigen::MatrixXd design_;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
};

OlsFit ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, bool intercept);

// Per-subject data of one or more stages laid out as columns
//   A_t | M_t (d) | R_t | M_{t-1} (d) | R_{t-1}
// with rows stacked stage after stage. History columns are zero at the first
// stage.
class StageFrame {
 public:
  StageFrame(const Panel& panel, int stage);
  // Stages first..last_exclusive-1 stacked. History columns are kept
  // whenever more than one stage is stacked.
  StageFrame(const Panel& panel, int first, int last_exclusive);

  int d() const { return d_; }
  bool has_history() const { return history_; }
  const Eigen::MatrixXd& data() const { return data_; }

  int col_a() const { return 0; }
  int col_m(int j) const { return 1 + j; }
  int col_r() const { return 1 + d_; }
  int col_m_prev(int j) const { return 2 + d_ + j; }
  int col_r_prev() const { return 2 + 2 * d_; }

  Eigen::MatrixXd columns(const std::vector<int>& idx) const;
  Eigen::VectorXd column(int c) const { return data_.col(c); }

  // A_t followed by M_{t-1} and R_{t-1} when history is present.
  std::vector<int> base_columns(bool with_history = true) const;

 private:
  int d_;
  bool history_;
  Eigen::MatrixXd data_;
};

struct WithinStageOptions {
  // Adjust the mediator regressions for M_{t-1} and R_{t-1}.
  bool adjust_history = true;
  // Also adjust the treatment regressions for history. Off by default: the
  // treatment is randomized so the plain regression is already unbiased.
  bool adjust_treatment = false;
};

// Within-stage effects at a 0-based stage. theta_M_M(k, j) is estimated only
// for descendants k of j; the diagonal is 1 and every other entry 0.
// RankDeficient is rethrown with stage and mediator context.
WithinStage within_stage_effects(const Panel& panel, const DagStructure& dag,
                                 int stage, const WithinStageOptions& opt = {});

// Same regressions on stages first_stage..T-1 (0-based) stacked. By default
// stage 0, whose history is the constant initial value, is left out.
WithinStage within_stage_effects_pooled(const Panel& panel,
                                        const DagStructure& dag,
                                        const WithinStageOptions& opt = {},
                                        int first_stage = 1);

// Theta_1 and Theta_2 by OLS, W refit on the support of `dag` with the same
// adjustment. At stage 0 Gamma1, zeta1, gamma2 and zeta2 are zero.
SemParams fit_sem_params(const Panel& panel, const DagStructure& dag, int stage);
SemParams fit_sem_params_pooled(const Panel& panel, const DagStructure& dag,
                                int first_stage = 1);

}  // namespace dynmed
