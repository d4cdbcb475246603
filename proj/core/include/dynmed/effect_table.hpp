#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dynmed/model.hpp"

namespace dynmed {

// Total effects between stages s <= t (0-based):
//   A_to_R(s,t)   theta_{A_s -> R_t}
//   A_to_M(s,t)   theta_{A_s -> M_t}            (d)
//   M_to_R(s,t)   theta_{M_sj -> R_t} over j    (d)
//   M_to_M(s,t)   theta_{M_sj -> M_t}, column j (d x d)
// Entries are stored for the lower triangle s <= t, O(T^2 d^2) doubles.
class EffectTable {
 public:
  EffectTable(int d, int T);

  int d() const noexcept { return d_; }
  int T() const noexcept { return T_; }

  bool has(int s, int t) const;

  void set_within_stage(int t, const WithinStage& w);
  void set(int s, int t, double a_to_r, const Eigen::VectorXd& a_to_m,
           const Eigen::VectorXd& m_to_r, const Eigen::MatrixXd& m_to_m);

  // These throw MissingQuantity when (s, t) has not been filled.
  double A_to_R(int s, int t) const;
  const Eigen::VectorXd& A_to_M(int s, int t) const;
  const Eigen::VectorXd& M_to_R(int s, int t) const;
  const Eigen::MatrixXd& M_to_M(int s, int t) const;

 private:
  std::size_t index(int s, int t) const;
  void require(int s, int t) const;

  int d_;
  int T_;
  std::vector<char> filled_;
  std::vector<double> a_to_r_;
  std::vector<Eigen::VectorXd> a_to_m_;
  std::vector<Eigen::VectorXd> m_to_r_;
  std::vector<Eigen::MatrixXd> m_to_m_;
};

}  // namespace dynmed
