#pragma once

#include <optional>

#include <Eigen/Dense>

#include "dynmed/dag.hpp"

namespace dynmed {

// Parameters of one stage of the linear structural equation model
//
//   mu_t = alpha1 + delta1 A_t + Gamma1 M_{t-1} + zeta1 R_{t-1}
//   M_t - mu_t = W^T (M_t - mu_t) + eps_w
//   R_t = alpha2 + delta2 A_t + gamma2^T M_{t-1} + zeta2 R_{t-1}
//         + kappa^T M_t + eps_r
//
// W only couples the deviations from the conditional mean, so delta1 is the
// total effect of A_t on M_t. Gamma1(k, i) multiplies M_{t-1,i} in the
// equation for M_tk.
struct SemParams {
  DagStructure dag;
  Eigen::VectorXd alpha1;
  Eigen::VectorXd delta1;
  Eigen::MatrixXd Gamma1;
  Eigen::VectorXd zeta1;
  double alpha2 = 0.0;
  double delta2 = 0.0;
  Eigen::VectorXd gamma2;
  double zeta2 = 0.0;
  Eigen::VectorXd kappa;

  int d() const noexcept { return dag.d(); }

  // All-zero parameters with an edgeless DAG.
  static SemParams zeros(int d);

  // Throws DimensionMismatch when extents disagree with d.
  void check() const;

  // One-step map of the effect of a past intervention on (M_t, R_t):
  // x_t = transition() x_{t-1}, the (d+1) x (d+1) matrix (I - B6)^{-1} B7.
  Eigen::MatrixXd transition() const;

  // The same map while M_tj is held fixed at every stage. The long-run effect
  // through mediator j only exists when this one is stable too.
  Eigen::MatrixXd held_transition(int j) const;

  // B6 + B7 of the infinite-horizon closed form.
  Eigen::MatrixXd b6_plus_b7() const;
};

double spectral_radius(const Eigen::MatrixXd& m);

// Within-stage total effects at one stage t.
//   theta_A_R       effect of A_t on R_t
//   theta_A_M(k)    effect of A_t on M_tk
//   theta_M_R(j)    effect of M_tj on R_t
//   theta_M_M(k,j)  effect of M_tj on M_tk (column j; entry (j,j) is 1)
struct WithinStage {
  double theta_A_R = 0.0;
  Eigen::VectorXd theta_A_M;
  Eigen::VectorXd theta_M_R;
  Eigen::MatrixXd theta_M_M;

  static WithinStage zeros(int d);
};

// Model-implied within-stage effects of a parameter set.
WithinStage analytic_within_stage(const SemParams& params);

enum class Horizon { finite, infinite };

struct ReportArrays {
  Eigen::MatrixXd eta;
  Eigen::MatrixXd iime;
  Eigen::MatrixXd dime;
  Eigen::MatrixXd delta;
};

// Individual mediation effects. For a finite horizon row t holds stage t+1:
// eta(t, j) is the cumulative effect over the first t+1 stages, delta the
// incremental effect at that stage, split into iime + dime. For an infinite
// horizon there is a single row: eta is the limit, delta = eta (the limit of
// the incremental effects) and iime/dime its stationary split.
struct MediationReport {
  Horizon horizon = Horizon::finite;
  Eigen::MatrixXd eta;
  Eigen::MatrixXd iime;
  Eigen::MatrixXd dime;
  Eigen::MatrixXd delta;
  std::optional<ReportArrays> bootstrap_se;

  int stages() const { return static_cast<int>(eta.rows()); }
  int d() const { return static_cast<int>(eta.cols()); }

  static MediationReport zeros(Horizon horizon, int rows, int d);

  // Largest violation of t*eta(t) - (t-1)*eta(t-1) = delta(t) and
  // delta = iime + dime (finite), or delta = eta and delta = iime + dime
  // (infinite).
  double identity_violation() const;
};

}  // namespace dynmed
