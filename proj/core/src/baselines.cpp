#include "dynmed/baselines.hpp"

#include "dynmed/effects_finite.hpp"
#include "dynmed/effects_infinite.hpp"
#include "dynmed/regress.hpp"

namespace dynmed {

namespace {

// Row t: theta_{A_t -> M_tj} theta_{M_tj -> R_t} from stage-t data alone.
Eigen::MatrixXd per_stage_products(const Panel& panel, const DagLearnConfig& cfg) {
  const int T = panel.T(), d = panel.d();
  WithinStageOptions opt;
  opt.adjust_history = false;
  opt.adjust_treatment = false;
  Eigen::MatrixXd out(T, d);
  for (int t = 0; t < T; ++t) {
    const DagStructure dag = cfg.empty ? DagStructure(d)
                                       : learn_dag(residualize(panel, t, false), cfg);
    const WithinStage w = within_stage_effects(panel, dag, t, opt);
    out.row(t) = w.theta_A_M.cwiseProduct(w.theta_M_R).transpose();
  }
  return out;
}

}  // namespace

MediationReport estimate_independent_timepoints(const Panel& panel,
                                                const DagLearnConfig& cfg) {
  const Eigen::MatrixXd prod = per_stage_products(panel, cfg);
  const int T = panel.T(), d = panel.d();
  MediationReport rep = MediationReport::zeros(Horizon::finite, T, d);
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d);
  for (int t = 0; t < T; ++t) {
    acc += prod.row(t);
    rep.eta.row(t) = acc / (t + 1);
  }
  rep.delta = prod;
  rep.iime = prod;
  return rep;
}

MediationReport estimate_independent_timepoints_infinite(const Panel& panel,
                                                         const DagLearnConfig& cfg) {
  const Eigen::MatrixXd prod = per_stage_products(panel, cfg);
  MediationReport rep = MediationReport::zeros(Horizon::infinite, 1, panel.d());
  rep.eta.row(0) = prod.colwise().mean();
  rep.delta = rep.eta;
  rep.iime = rep.eta;
  return rep;
}

MediationReport estimate_independent_mediators(const Panel& panel) {
  FiniteOptions opt;
  opt.dag.empty = true;
  return fit_finite(panel, opt).report;
}

MediationReport estimate_independent_mediators_infinite(const Panel& panel) {
  InfiniteOptions opt;
  opt.dag.empty = true;
  return fit_infinite(panel, opt).report;
}

}  // namespace dynmed
