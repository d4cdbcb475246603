#include "dynmed/harness/spline.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dynmed/error.hpp"
#include "dynmed/regress.hpp"

namespace dynmed {

namespace {

Eigen::VectorXd rescale(const Eigen::VectorXd& x) {
  const double lo = x.minCoeff(), hi = x.maxCoeff();
  if (!(hi > lo)) throw InsufficientPoints("spline needs at least two distinct x values");
  return (x.array() - lo) / (hi - lo);
}

double cube_plus(double v) { return v > 0.0 ? v * v * v : 0.0; }

}  // namespace

Eigen::VectorXd natural_spline_knots(const Eigen::VectorXd& x, int df) {
  if (df < 2) throw InsufficientPoints("spline df must be >= 2");
  if (x.size() < df) throw InsufficientPoints("spline df exceeds the number of points");
  const Eigen::VectorXd u = rescale(x);
  std::vector<double> sorted(u.data(), u.data() + u.size());
  std::sort(sorted.begin(), sorted.end());
  Eigen::VectorXd knots(df);
  const double last = static_cast<double>(sorted.size() - 1);
  for (int k = 0; k < df; ++k) {
    // linear interpolation between order statistics
    const double pos = last * k / (df - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    knots(k) = sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
  }
  for (int k = 1; k < df; ++k) {
    if (!(knots(k) > knots(k - 1))) throw InsufficientPoints("spline knots are not distinct");
  }
  return knots;
}

Eigen::MatrixXd natural_spline_basis(const Eigen::VectorXd& x, int df) {
  const Eigen::VectorXd knots = natural_spline_knots(x, df);
  const Eigen::VectorXd u = rescale(x);
  const int K = df;
  const double xi_last = knots(K - 1), xi_pen = knots(K - 2);
  auto dk = [&](double v, int k) {
    return (cube_plus(v - knots(k)) - cube_plus(v - xi_last)) / (xi_last - knots(k));
  };
  Eigen::MatrixXd basis(u.size(), K);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double v = u(i);
    basis(i, 0) = 1.0;
    basis(i, 1) = v;
    const double d_pen = (cube_plus(v - xi_pen) - cube_plus(v - xi_last)) / (xi_last - xi_pen);
    for (int k = 0; k < K - 2; ++k) basis(i, 2 + k) = dk(v, k) - d_pen;
  }
  return basis;
}

Eigen::VectorXd smooth_trajectory(const Eigen::VectorXd& values, int df) {
  const Eigen::Index T = values.size();
  if (df < 2 || T < df) throw InsufficientPoints("smoothing needs T >= df >= 2");
  if (!values.allFinite()) throw NonFiniteValue(-1, -1, "trajectory value");
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(T, 0.0, static_cast<double>(T - 1));
  const Eigen::MatrixXd basis = natural_spline_basis(x, df);
  if (T == df) return values;  // square basis: the spline interpolates
  const LeastSquares ls(basis.rightCols(df - 1), true);
  return basis * ls.solve(values);
}

}  // namespace dynmed
