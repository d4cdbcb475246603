#include "dynmed/effect_table.hpp"

#include <string>

#include "dynmed/error.hpp"

namespace dynmed {

EffectTable::EffectTable(int d, int T) : d_(d), T_(T) {
  const std::size_t pairs = static_cast<std::size_t>(T) * (T + 1) / 2;
  filled_.assign(pairs, 0);
  a_to_r_.assign(pairs, 0.0);
  a_to_m_.resize(pairs);
  m_to_r_.resize(pairs);
  m_to_m_.resize(pairs);
}

std::size_t EffectTable::index(int s, int t) const {
  return static_cast<std::size_t>(t) * (t + 1) / 2 + s;
}

bool EffectTable::has(int s, int t) const {
  if (s < 0 || t < 0 || s > t || t >= T_) return false;
  return filled_[index(s, t)] != 0;
}

void EffectTable::require(int s, int t) const {
  if (!has(s, t)) {
    throw MissingQuantity("effect table has no entry for stage pair (" +
                          std::to_string(s + 1) + ", " + std::to_string(t + 1) +
                          ")");
  }
}

void EffectTable::set_within_stage(int t, const WithinStage& w) {
  set(t, t, w.theta_A_R, w.theta_A_M, w.theta_M_R, w.theta_M_M);
}

void EffectTable::set(int s, int t, double a_to_r, const Eigen::VectorXd& a_to_m,
                      const Eigen::VectorXd& m_to_r,
                      const Eigen::MatrixXd& m_to_m) {
  if (s < 0 || s > t || t >= T_) {
    throw MissingQuantity("stage pair outside the effect table");
  }
  const std::size_t k = index(s, t);
  a_to_r_[k] = a_to_r;
  a_to_m_[k] = a_to_m;
  m_to_r_[k] = m_to_r;
  m_to_m_[k] = m_to_m;
  filled_[k] = 1;
}

double EffectTable::A_to_R(int s, int t) const {
  require(s, t);
  return a_to_r_[index(s, t)];
}

const Eigen::VectorXd& EffectTable::A_to_M(int s, int t) const {
  require(s, t);
  return a_to_m_[index(s, t)];
}

const Eigen::VectorXd& EffectTable::M_to_R(int s, int t) const {
  require(s, t);
  return m_to_r_[index(s, t)];
}

const Eigen::MatrixXd& EffectTable::M_to_M(int s, int t) const {
  require(s, t);
  return m_to_m_[index(s, t)];
}

}  // namespace dynmed
