#include "dynmed/regress.hpp"

#include <algorithm>
#include <string>

#include "dynmed/error.hpp"

namespace dynmed {

LeastSquares::LeastSquares(const Eigen::MatrixXd& X, bool intercept)
    : rows_(static_cast<int>(X.rows())),
      cols_(static_cast<int>(X.cols()) + (intercept ? 1 : 0)),
      intercept_(intercept) {
  design_.resize(rows_, cols_);
  if (intercept) design_.col(0).setOnes();
  design_.rightCols(X.cols()) = X;
  if (!design_.allFinite()) throw NumericalError("design matrix is not finite");
  if (rows_ <= cols_) {
    std::vector<int> extra;
    for (int c = std::max(rows_ - 1, 0); c < cols_; ++c) extra.push_back(c);
    throw RankDeficient("design has " + std::to_string(rows_) + " rows for " +
                            std::to_string(cols_) + " columns",
                        extra);
  }
  scale_ = design_.colwise().norm().transpose();
  std::vector<int> zero_cols;
  for (int c = 0; c < cols_; ++c) {
    if (scale_(c) == 0.0) {
      zero_cols.push_back(c);
      scale_(c) = 1.0;
    }
  }
  if (!zero_cols.empty()) throw RankDeficient("design column is zero", zero_cols);
  design_ = design_ * scale_.cwiseInverse().asDiagonal();
  qr_.setThreshold(kRankThreshold);
  qr_.compute(design_);
  const int rank = static_cast<int>(qr_.rank());
  if (rank < cols_) {
    std::vector<int> bad;
    const auto& perm = qr_.colsPermutation().indices();
    for (int k = rank; k < cols_; ++k) bad.push_back(perm(k));
    std::sort(bad.begin(), bad.end());
    throw RankDeficient("design is not of full column rank", bad);
  }
}

Eigen::VectorXd LeastSquares::solve(const Eigen::VectorXd& y) const {
  if (y.size() != rows_) throw DimensionMismatch("response length differs from design rows");
  return qr_.solve(y).cwiseQuotient(scale_);
}

OlsFit LeastSquares::fit(const Eigen::VectorXd& y) const {
  OlsFit out;
  out.coefficients = solve(y);
  const Eigen::VectorXd resid =
      y - design_ * out.coefficients.cwiseProduct(scale_);
  out.residual_variance = resid.squaredNorm() / (rows_ - cols_);
  out.design_rank = cols_;
  out.n_used = rows_;
  return out;
}

OlsFit ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, bool intercept) {
  if (y.size() != X.rows()) throw DimensionMismatch("y and X row counts differ");
  return LeastSquares(X, intercept).fit(y);
}

StageFrame::StageFrame(const Panel& panel, int stage)
    : StageFrame(panel, stage, stage + 1) {}

StageFrame::StageFrame(const Panel& panel, int first, int last_exclusive)
    : d_(panel.d()), history_(first > 0 || last_exclusive - first > 1) {
  if (first < 0 || last_exclusive > panel.T() || first >= last_exclusive) {
    throw ValidationError("stage range out of bounds");
  }
  const int n = panel.n();
  const int stages = last_exclusive - first;
  data_.setZero(static_cast<Eigen::Index>(n) * stages, 3 + 2 * d_);
  for (int s = 0; s < stages; ++s) {
    const int t = first + s;
    auto block = data_.middleRows(static_cast<Eigen::Index>(s) * n, n);
    block.col(col_a()) = panel.stage_treatments(t);
    block.middleCols(col_m(0), d_) = panel.stage_mediators(t);
    block.col(col_r()) = panel.stage_outcomes(t);
    if (t > 0) {
      block.middleCols(col_m_prev(0), d_) = panel.stage_mediators(t - 1);
      block.col(col_r_prev()) = panel.stage_outcomes(t - 1);
    }
  }
}

Eigen::MatrixXd StageFrame::columns(const std::vector<int>& idx) const {
  return data_(Eigen::all, idx);
}

std::vector<int> StageFrame::base_columns(bool with_history) const {
  std::vector<int> cols{col_a()};
  if (with_history && history_) {
    for (int j = 0; j < d_; ++j) cols.push_back(col_m_prev(j));
    cols.push_back(col_r_prev());
  }
  return cols;
}

namespace {

WithinStage within_stage_from_frame(const StageFrame& f, const DagStructure& dag,
                                    const WithinStageOptions& opt,
                                    std::optional<int> stage) {
  const int d = f.d();
  if (dag.d() != d) throw DimensionMismatch("DAG size differs from panel d");
  auto rethrow = [&](const RankDeficient& e, std::optional<int> j) {
    if (stage) throw e.at(*stage, j);
    throw e;
  };

  WithinStage out = WithinStage::zeros(d);
  try {
    const LeastSquares ls(f.columns(f.base_columns(opt.adjust_treatment)), true);
    out.theta_A_R = ls.solve(f.column(f.col_r()))(1);
    for (int k = 0; k < d; ++k) out.theta_A_M(k) = ls.solve(f.column(f.col_m(k)))(1);
  } catch (const RankDeficient& e) {
    rethrow(e, std::nullopt);
  }

  for (int j = 0; j < d; ++j) {
    try {
      // [M_j, Pa(j), A_t, history]
      std::vector<int> cols{f.col_m(j)};
      for (int p : dag.parents(j)) cols.push_back(f.col_m(p));
      for (int c : f.base_columns(opt.adjust_history)) cols.push_back(c);
      const LeastSquares ls(f.columns(cols), true);
      out.theta_M_R(j) = ls.solve(f.column(f.col_r()))(1);
      for (int k : dag.descendants(j)) {
        out.theta_M_M(k, j) = ls.solve(f.column(f.col_m(k)))(1);
      }
    } catch (const RankDeficient& e) {
      rethrow(e, j);
    }
  }
  return out;
}

SemParams sem_from_frame(const StageFrame& f, const DagStructure& dag,
                         std::optional<int> stage) {
  const int d = f.d();
  if (dag.d() != d) throw DimensionMismatch("DAG size differs from panel d");
  auto rethrow = [&](const RankDeficient& e, std::optional<int> j) {
    if (stage) throw e.at(*stage, j);
    throw e;
  };
  SemParams p = SemParams::zeros(d);
  const bool hist = f.has_history();
  const std::vector<int> base = f.base_columns();
  try {
    const LeastSquares ls(f.columns(base), true);
    for (int k = 0; k < d; ++k) {
      const Eigen::VectorXd b = ls.solve(f.column(f.col_m(k)));
      p.alpha1(k) = b(0);
      p.delta1(k) = b(1);
      if (hist) {
        p.Gamma1.row(k) = b.segment(2, d).transpose();
        p.zeta1(k) = b(2 + d);
      }
    }
  } catch (const RankDeficient& e) {
    rethrow(e, std::nullopt);
  }
  try {
    std::vector<int> cols = base;
    for (int k = 0; k < d; ++k) cols.push_back(f.col_m(k));
    const Eigen::VectorXd b = LeastSquares(f.columns(cols), true).solve(f.column(f.col_r()));
    p.alpha2 = b(0);
    p.delta2 = b(1);
    int next = 2;
    if (hist) {
      p.gamma2 = b.segment(2, d);
      p.zeta2 = b(2 + d);
      next = 3 + d;
    }
    p.kappa = b.segment(next, d);
  } catch (const RankDeficient& e) {
    rethrow(e, std::nullopt);
  }

  // Given the support, the coefficient of a parent in the node's regression
  // on (parents, A_t, history) is the edge weight.
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const std::vector<int> pa = dag.parents(k);
    if (pa.empty()) continue;
    try {
      std::vector<int> cols;
      for (int q : pa) cols.push_back(f.col_m(q));
      for (int c : base) cols.push_back(c);
      const Eigen::VectorXd b = LeastSquares(f.columns(cols), true).solve(f.column(f.col_m(k)));
      for (std::size_t q = 0; q < pa.size(); ++q) {
        // An exactly zero refit would silently drop the edge; keep it tiny.
        double v = b(1 + static_cast<Eigen::Index>(q));
        if (std::abs(v) < DagStructure::kStructuralZero) {
          v = v < 0 ? -2 * DagStructure::kStructuralZero : 2 * DagStructure::kStructuralZero;
        }
        w(pa[q], k) = v;
      }
    } catch (const RankDeficient& e) {
      rethrow(e, k);
    }
  }
  p.dag = dag.with_weights(w);
  return p;
}

}  // namespace

WithinStage within_stage_effects(const Panel& panel, const DagStructure& dag,
                                 int stage, const WithinStageOptions& opt) {
  return within_stage_from_frame(StageFrame(panel, stage), dag, opt, stage);
}

WithinStage within_stage_effects_pooled(const Panel& panel,
                                        const DagStructure& dag,
                                        const WithinStageOptions& opt,
                                        int first_stage) {
  if (panel.T() < 2) throw ValidationError("pooling needs T >= 2");
  return within_stage_from_frame(StageFrame(panel, first_stage, panel.T()), dag,
                                 opt, std::nullopt);
}

SemParams fit_sem_params(const Panel& panel, const DagStructure& dag, int stage) {
  return sem_from_frame(StageFrame(panel, stage), dag, stage);
}

SemParams fit_sem_params_pooled(const Panel& panel, const DagStructure& dag,
                                int first_stage) {
  if (panel.T() < 2) throw ValidationError("pooling needs T >= 2");
  return sem_from_frame(StageFrame(panel, first_stage, panel.T()), dag,
                        std::nullopt);
}

}  // namespace dynmed
