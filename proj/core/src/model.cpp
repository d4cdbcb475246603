#include "dynmed/model.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "dynmed/error.hpp"

namespace dynmed {

SemParams SemParams::zeros(int d) {
  SemParams p;
  p.dag = DagStructure(d);
  p.alpha1 = Eigen::VectorXd::Zero(d);
  p.delta1 = Eigen::VectorXd::Zero(d);
  p.Gamma1 = Eigen::MatrixXd::Zero(d, d);
  p.zeta1 = Eigen::VectorXd::Zero(d);
  p.gamma2 = Eigen::VectorXd::Zero(d);
  p.kappa = Eigen::VectorXd::Zero(d);
  return p;
}

void SemParams::check() const {
  const int k = d();
  if (k < 1) throw DimensionMismatch("SemParams needs d >= 1");
  if (alpha1.size() != k || delta1.size() != k || zeta1.size() != k ||
      gamma2.size() != k || kappa.size() != k || Gamma1.rows() != k ||
      Gamma1.cols() != k) {
    throw DimensionMismatch("SemParams extents disagree with d = " +
                            std::to_string(k));
  }
}

Eigen::MatrixXd SemParams::transition() const {
  const int k = d();
  Eigen::MatrixXd m(k + 1, k + 1);
  m.topLeftCorner(k, k) = Gamma1;
  m.topRightCorner(k, 1) = zeta1;
  m.bottomLeftCorner(1, k) = kappa.transpose() * Gamma1 + gamma2.transpose();
  m(k, k) = kappa.dot(zeta1) + zeta2;
  return m;
}

Eigen::MatrixXd SemParams::held_transition(int j) const {
  const int k = d();
  // A mean shift in M_tj is cancelled by the hold, and its descendants see
  // the cancelled deviation through (I - W^T)^{-1}.
  const Eigen::MatrixXd inv =
      (Eigen::MatrixXd::Identity(k, k) - dag.weights().transpose()).inverse();
  Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(k, k);
  proj.col(j) -= inv.col(j);
  Eigen::MatrixXd m(k + 1, k + 1);
  m.topLeftCorner(k, k) = proj * Gamma1;
  m.topRightCorner(k, 1) = proj * zeta1;
  m.bottomLeftCorner(1, k) = kappa.transpose() * m.topLeftCorner(k, k) + gamma2.transpose();
  m(k, k) = kappa.dot(m.topRightCorner(k, 1).col(0)) + zeta2;
  return m;
}

Eigen::MatrixXd SemParams::b6_plus_b7() const {
  const int k = d();
  Eigen::MatrixXd m(k + 1, k + 1);
  m.topLeftCorner(k, k) = Gamma1;
  m.topRightCorner(k, 1) = zeta1;
  m.bottomLeftCorner(1, k) = (kappa + gamma2).transpose();
  m(k, k) = zeta2;
  return m;
}

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

WithinStage WithinStage::zeros(int d) {
  WithinStage w;
  w.theta_A_M = Eigen::VectorXd::Zero(d);
  w.theta_M_R = Eigen::VectorXd::Zero(d);
  w.theta_M_M = Eigen::MatrixXd::Identity(d, d);
  return w;
}

WithinStage analytic_within_stage(const SemParams& params) {
  params.check();
  const int d = params.d();
  WithinStage w;
  // Column j of (I - W^T)^{-1} holds the path sums from M_j in the mediator
  // DAG; acyclicity makes the diagonal exactly 1.
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
  w.theta_M_M =
      (eye - params.dag.weights().transpose()).partialPivLu().solve(eye);
  w.theta_A_M = params.delta1;
  w.theta_M_R = w.theta_M_M.transpose() * params.kappa;
  w.theta_A_R = params.delta2 + params.kappa.dot(params.delta1);
  return w;
}

MediationReport MediationReport::zeros(Horizon horizon, int rows, int d) {
  MediationReport r;
  r.horizon = horizon;
  r.eta = Eigen::MatrixXd::Zero(rows, d);
  r.iime = Eigen::MatrixXd::Zero(rows, d);
  r.dime = Eigen::MatrixXd::Zero(rows, d);
  r.delta = Eigen::MatrixXd::Zero(rows, d);
  return r;
}

double MediationReport::identity_violation() const {
  double worst = (delta - iime - dime).cwiseAbs().maxCoeff();
  if (horizon == Horizon::infinite) {
    return std::max(worst, (delta - eta).cwiseAbs().maxCoeff());
  }
  for (int t = 0; t < stages(); ++t) {
    for (int j = 0; j < d(); ++j) {
      const double prev = t > 0 ? eta(t - 1, j) : 0.0;
      const double inc = (t + 1) * eta(t, j) - t * prev;
      worst = std::max(worst, std::abs(inc - delta(t, j)));
    }
  }
  return worst;
}

}  // namespace dynmed
