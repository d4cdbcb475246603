#include "dynmed/effects_finite.hpp"

#include <string>

#include "dynmed/error.hpp"

namespace dynmed {

void propagate_cross_stage(EffectTable& table, const SemParams& p, int t) {
  if (t < 1 || t >= table.T()) throw ValidationError("propagation stage out of range");
  if (!table.has(t, t)) {
    throw MissingQuantity("within-stage effects of stage " + std::to_string(t + 1) +
                          " are missing");
  }
  for (int s = 0; s < t; ++s) {
    const Eigen::VectorXd& am_prev = table.A_to_M(s, t - 1);
    const double ar_prev = table.A_to_R(s, t - 1);
    const Eigen::MatrixXd& mm_prev = table.M_to_M(s, t - 1);
    const Eigen::VectorXd& mr_prev = table.M_to_R(s, t - 1);

    const Eigen::VectorXd am = p.Gamma1 * am_prev + p.zeta1 * ar_prev;
    const Eigen::MatrixXd mm = p.Gamma1 * mm_prev + p.zeta1 * mr_prev.transpose();
    const double ar = p.zeta2 * ar_prev + p.kappa.dot(am) + p.gamma2.dot(am_prev);
    const Eigen::VectorXd mr = p.zeta2 * mr_prev + mm.transpose() * p.kappa +
                               mm_prev.transpose() * p.gamma2;
    table.set(s, t, ar, am, mr, mm);
  }
}

Eigen::VectorXd intervened_carryover(const EffectTable& table, int j, int t) {
  Eigen::VectorXd c(t + 1);
  c(t) = table.M_to_R(t, t)(j);
  for (int s = t - 1; s >= 0; --s) {
    double v = table.M_to_R(s, t)(j);
    for (int i = s + 1; i <= t; ++i) v -= table.M_to_M(s, i)(j, j) * c(i);
    c(s) = v;
  }
  return c;
}

FiniteEstimatorState::FiniteEstimatorState(EffectTable t)
    : table(std::move(t)),
      report(MediationReport::zeros(Horizon::finite, table.T(), table.d())),
      prefix_(Eigen::MatrixXd::Zero(table.T(), table.d())) {
  intervened.resize(table.T());
}

void FiniteEstimatorState::advance(int t) {
  if (t != next_) throw MissingQuantity("stages must be advanced in order");
  const int d = table.d();
  for (int s = 0; s <= t; ++s) prefix_.row(t) += table.A_to_M(s, t).transpose();

  Eigen::MatrixXd& c = intervened[t];
  c.resize(t + 1, d);
  for (int j = 0; j < d; ++j) c.col(j) = intervened_carryover(table, j, t);

  for (int j = 0; j < d; ++j) {
    double delta = 0.0;
    for (int i = 0; i <= t; ++i) delta += prefix_(i, j) * c(i, j);
    const double iime = table.A_to_M(t, t)(j) * table.M_to_R(t, t)(j);
    const double prev = t > 0 ? report.eta(t - 1, j) : 0.0;
    report.delta(t, j) = delta;
    report.iime(t, j) = iime;
    report.dime(t, j) = delta - iime;
    report.eta(t, j) = (t * prev + delta) / (t + 1);
  }
  ++next_;
}

MediationReport mediation_from_table(const EffectTable& table) {
  FiniteEstimatorState state(table);
  for (int t = 0; t < table.T(); ++t) state.advance(t);
  return state.report;
}

EffectTable true_effect_table(const std::vector<SemParams>& params, int T) {
  if (params.empty() || (params.size() != 1 && static_cast<int>(params.size()) != T)) {
    throw ValidationError("params must have length 1 or T");
  }
  const int d = params.front().d();
  EffectTable table(d, T);
  for (int t = 0; t < T; ++t) {
    const SemParams& p = params.size() == 1 ? params.front() : params[t];
    table.set_within_stage(t, analytic_within_stage(p));
    if (t > 0) propagate_cross_stage(table, p, t);
  }
  return table;
}

std::pair<double, double> treatment_to_mediator_decomposition(
    const EffectTable& table, int t, int j) {
  double delayed = 0.0;
  for (int s = 0; s < t; ++s) delayed += table.A_to_M(s, t)(j);
  return {table.A_to_M(t, t)(j), delayed};
}

FiniteFit fit_finite(const Panel& panel, const FiniteOptions& opt) {
  const int T = panel.T(), d = panel.d();
  FiniteFit fit{{}, {}, EffectTable(d, T), MediationReport{}};
  fit.dags.reserve(T);
  fit.params.reserve(T);
  for (int t = 0; t < T; ++t) {
    DagStructure dag = opt.dag.empty ? DagStructure(d)
                                     : learn_dag(residualize(panel, t), opt.dag);
    fit.table.set_within_stage(t, within_stage_effects(panel, dag, t, opt.within));
    fit.params.push_back(fit_sem_params(panel, dag, t));
    if (t > 0) propagate_cross_stage(fit.table, fit.params.back(), t);
    fit.dags.push_back(std::move(dag));
  }
  fit.report = mediation_from_table(fit.table);
  return fit;
}

MediationReport estimate_finite(const Panel& panel, const DagLearnConfig& cfg) {
  FiniteOptions opt;
  opt.dag = cfg;
  return fit_finite(panel, opt).report;
}

MediationReport finite_eta_stationary(const SemParams& p, const WithinStage& w,
                                      int T) {
  if (T < 1) throw ValidationError("T must be >= 1");
  const int d = p.d();
  // Lag-L effects of a stage-s variable on stage s+L.
  std::vector<Eigen::VectorXd> a_m(T);
  std::vector<Eigen::MatrixXd> m_m(T);
  std::vector<Eigen::VectorXd> m_r(T);
  a_m[0] = w.theta_A_M;
  m_m[0] = w.theta_M_M;
  m_r[0] = w.theta_M_R;
  double a_r = w.theta_A_R;
  for (int L = 1; L < T; ++L) {
    a_m[L] = p.Gamma1 * a_m[L - 1] + p.zeta1 * a_r;
    a_r = p.zeta2 * a_r + p.kappa.dot(a_m[L]) + p.gamma2.dot(a_m[L - 1]);
    m_m[L] = p.Gamma1 * m_m[L - 1] + p.zeta1 * m_r[L - 1].transpose();
    m_r[L] = p.zeta2 * m_r[L - 1] + m_m[L].transpose() * p.kappa +
             m_m[L - 1].transpose() * p.gamma2;
  }

  MediationReport rep = MediationReport::zeros(Horizon::finite, T, d);
  Eigen::VectorXd cum = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd prefix(T, d);  // sum_{L <= i} a_m[L]
  for (int i = 0; i < T; ++i) {
    cum += a_m[i];
    prefix.row(i) = cum.transpose();
  }
  Eigen::VectorXd c(T);
  for (int j = 0; j < d; ++j) {
    // c(L): intervened carryover from lag L, the same for every target stage.
    for (int L = 0; L < T; ++L) {
      double v = m_r[L](j);
      for (int k = 1; k <= L; ++k) v -= m_m[k](j, j) * c(L - k);
      c(L) = v;
    }
    const double iime = a_m[0](j) * m_r[0](j);
    double eta = 0.0;
    for (int t = 0; t < T; ++t) {
      double delta = 0.0;
      for (int i = 0; i <= t; ++i) delta += prefix(i, j) * c(t - i);
      eta = (t * eta + delta) / (t + 1);
      rep.delta(t, j) = delta;
      rep.iime(t, j) = iime;
      rep.dime(t, j) = delta - iime;
      rep.eta(t, j) = eta;
    }
  }
  return rep;
}

}  // namespace dynmed
