#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dynmed {

using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Observed treatment-mediator-outcome trajectories for n subjects over T
// stages with d mediators. Stages are 0-based in the API.
//
// Storage is stage-major: all subjects of stage t are contiguous, so the
// per-stage regressions read each stage as a single block. Mediators of one
// (stage, subject) pair are contiguous as well, which makes a stage block a
// row-major n x d matrix.
class Panel {
 public:
  // Validates extents and finiteness; throws DimensionMismatch or
  // NonFiniteValue. `treatments`/`outcomes` are indexed [t * n + i] and
  // `mediators` [(t * n + i) * d + j].
  Panel(int n, int T, int d, std::vector<double> treatments,
        std::vector<double> mediators, std::vector<double> outcomes);

  int n() const noexcept { return n_; }
  int T() const noexcept { return T_; }
  int d() const noexcept { return d_; }

  double treatment(int i, int t) const { return a_[idx(i, t)]; }
  double outcome(int i, int t) const { return r_[idx(i, t)]; }
  double mediator(int i, int t, int j) const { return m_[idx(i, t) * d_ + j]; }

  Eigen::Map<const Eigen::VectorXd> stage_treatments(int t) const;
  Eigen::Map<const Eigen::VectorXd> stage_outcomes(int t) const;
  Eigen::Map<const RowMatrixXd> stage_mediators(int t) const;

  // Panel made of the listed subjects (repeats allowed), in the given order.
  Panel select_subjects(std::span<const int> subjects) const;

  // Panel with mediators permuted: new mediator k is old mediator perm[k].
  Panel permute_mediators(std::span<const int> perm) const;

  // Pooled z-scoring of each mediator and of the outcome over all (i, t).
  Panel standardized() const;

  const std::vector<double>& raw_treatments() const noexcept { return a_; }
  const std::vector<double>& raw_mediators() const noexcept { return m_; }
  const std::vector<double>& raw_outcomes() const noexcept { return r_; }

  bool operator==(const Panel&) const = default;

 private:
  std::size_t idx(int i, int t) const {
    return static_cast<std::size_t>(t) * n_ + i;
  }

  int n_;
  int T_;
  int d_;
  std::vector<double> a_;
  std::vector<double> m_;
  std::vector<double> r_;
};

// Nested, subject-major input as it typically arrives from user code:
// treatments[i][t], mediators[i][t][j], outcomes[i][t].
struct RawPanel {
  int d = 0;
  std::vector<std::vector<double>> treatments;
  std::vector<std::vector<std::vector<double>>> mediators;
  std::vector<std::vector<double>> outcomes;
};

// Checks that all arrays share (n, T) extents, that every mediator vector
// has depth d >= 1 and that every entry is finite.
Panel validate_panel(const RawPanel& raw);

}  // namespace dynmed
