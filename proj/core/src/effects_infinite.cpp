#include "dynmed/effects_infinite.hpp"

#include <cmath>
#include <sstream>

#include "dynmed/error.hpp"

namespace dynmed {

namespace {

double condition_number(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 1.0;
  const double lo = sv(sv.size() - 1);
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return sv(0) / lo;
}

}  // namespace

StationaryQuantities stationary_quantities(const SemParams& p,
                                           const WithinStage& w,
                                           const StationarityGuard& guard) {
  p.check();
  const int d = p.d();
  const double radius = spectral_radius(p.transition());
  if (!(radius < 1.0 - guard.margin)) {
    std::ostringstream msg;
    msg << "transition spectral radius " << radius << " is not below 1 - "
        << guard.margin;
    throw NonStationaryModel(msg.str());
  }
  // Without this the closed form is finite but the running averages it is
  // meant to be the limit of diverge.
  for (int j = 0; j < d; ++j) {
    const double held = spectral_radius(p.held_transition(j));
    if (!(held < 1.0 - guard.margin)) {
      std::ostringstream msg;
      msg << "holding mediator " << j + 1 << " leaves a transition of spectral radius "
          << held << "; the long-run effect does not exist";
      throw NonStationaryModel(msg.str());
    }
  }

  StationaryQuantities q;
  q.theta_M_to_M1 = w.theta_M_M;
  q.theta_M_to_R1 = w.theta_M_R;
  q.B6 = Eigen::MatrixXd::Zero(d + 1, d + 1);
  q.B6.bottomLeftCorner(1, d) = p.kappa.transpose();
  q.B7.resize(d + 1, d + 1);
  q.B7.topLeftCorner(d, d) = p.Gamma1;
  q.B7.topRightCorner(d, 1) = p.zeta1;
  q.B7.bottomLeftCorner(1, d) = p.gamma2.transpose();
  q.B7(d, d) = p.zeta2;

  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd k1 =
      (1.0 - p.zeta2) * (eye - p.Gamma1) - p.zeta1 * (p.kappa + p.gamma2).transpose();
  q.cond_b1 = condition_number(k1);
  const Eigen::MatrixXd k2 = Eigen::MatrixXd::Identity(d + 1, d + 1) - q.B6 - q.B7;
  q.cond_b2 = condition_number(k2);
  if (!(q.cond_b1 < guard.max_condition) || !(q.cond_b2 < guard.max_condition)) {
    throw NonStationaryModel("long-run system is ill-conditioned");
  }
  q.B1 = k1.partialPivLu().solve((1.0 - p.zeta2) * p.delta1 + p.delta2 * p.zeta1);

  // One solve per mediator with right-hand side B7 (theta_M_M(:, j); theta_M_R(j)).
  Eigen::MatrixXd rhs(d + 1, d);
  rhs.topRows(d) = w.theta_M_M;
  rhs.row(d) = w.theta_M_R.transpose();
  const Eigen::MatrixXd x = k2.partialPivLu().solve(q.B7 * rhs);
  q.B2.resize(d);
  q.B3.resize(d);
  for (int j = 0; j < d; ++j) {
    q.B2(j) = x(j, j);
    q.B3(j) = x(d, j);
  }
  q.B4 = q.B2.cwiseProduct(q.B1);
  q.B5 = q.B3.cwiseProduct(q.B1);
  return q;
}

Eigen::VectorXd eta_infinite(const StationaryQuantities& q) {
  const Eigen::Index d = q.B1.size();
  Eigen::VectorXd eta(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double denom = 1.0 + q.B2(j);
    if (std::abs(denom) < 1e-12) {
      throw NonStationaryModel("1 + B2 vanishes for mediator " + std::to_string(j + 1));
    }
    eta(j) = q.theta_M_to_R1(j) * q.B1(j) +
             (q.B5(j) - q.theta_M_to_R1(j) * q.B4(j)) / denom;
  }
  return eta;
}

namespace {

MediationReport report_from(const Eigen::VectorXd& eta, const WithinStage& within) {
  const int d = static_cast<int>(eta.size());
  MediationReport rep = MediationReport::zeros(Horizon::infinite, 1, d);
  rep.eta.row(0) = eta.transpose();
  rep.delta.row(0) = eta.transpose();
  rep.iime.row(0) = within.theta_A_M.cwiseProduct(within.theta_M_R).transpose();
  rep.dime = rep.delta - rep.iime;
  return rep;
}

}  // namespace

MediationReport infinite_report(const SemParams& params, const WithinStage& within,
                                const StationarityGuard& guard) {
  return report_from(eta_infinite(stationary_quantities(params, within, guard)), within);
}

InfiniteFit fit_infinite(const Panel& panel, const InfiniteOptions& opt) {
  if (panel.T() < 2) throw ValidationError("infinite-horizon estimation needs T >= 2");
  if (opt.first_stage < 0 || opt.first_stage > 1) {
    throw ValidationError("first pooled stage must be 0 or 1");
  }
  InfiniteFit fit;
  fit.dag = opt.dag.empty ? DagStructure(panel.d())
                          : learn_dag(residualize_pooled(panel, opt.first_stage), opt.dag);
  fit.within = within_stage_effects_pooled(panel, fit.dag, opt.within, opt.first_stage);
  fit.params = fit_sem_params_pooled(panel, fit.dag, opt.first_stage);
  fit.quantities = stationary_quantities(fit.params, fit.within, opt.guard);
  fit.report = report_from(eta_infinite(fit.quantities), fit.within);
  return fit;
}

MediationReport estimate_infinite(const Panel& panel, const DagLearnConfig& cfg) {
  InfiniteOptions opt;
  opt.dag = cfg;
  return fit_infinite(panel, opt).report;
}

}  // namespace dynmed
