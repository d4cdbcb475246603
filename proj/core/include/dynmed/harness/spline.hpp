#pragma once

#include <Eigen/Dense>

namespace dynmed {

// Natural cubic spline basis with `df` knots placed at quantiles of x
// (boundary knots included), evaluated at x. Column 0 is the constant and
// column 1 the rescaled x, so the basis has df columns. x is mapped onto
// [0, 1] first.
Eigen::MatrixXd natural_spline_basis(const Eigen::VectorXd& x, int df);

// Knot positions on the rescaled [0, 1] axis.
Eigen::VectorXd natural_spline_knots(const Eigen::VectorXd& x, int df);

// Least-squares natural spline fit over stage index 0..T-1. Throws
// InsufficientPoints unless T >= df >= 2.
Eigen::VectorXd smooth_trajectory(const Eigen::VectorXd& values, int df);

}  // namespace dynmed
