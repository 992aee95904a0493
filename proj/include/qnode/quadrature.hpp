#pragma once

#include <Eigen/Dense>

#include "qnode/types.hpp"

namespace qnode {

/// Composite trapezoid rule on a uniform grid.
double trapezoid(const Eigen::VectorXd& f, double dt);
Complex trapezoid(const Eigen::VectorXcd& f, double dt);

/// Running trapezoid integral; element 0 is exactly 0. Monotone
/// non-decreasing for non-negative integrands.
Eigen::VectorXd cumulative_trapezoid(const Eigen::VectorXd& f, double dt);

/// Fourth-order central finite difference, second order at the four points
/// nearest the grid edges.
Eigen::VectorXcd finite_difference_4(const Eigen::VectorXcd& f, double dt);

/// Removes 2*pi jumps between consecutive samples.
Eigen::VectorXd unwrap_phase(Eigen::VectorXd phase);

/// d(arg x)/dt = Im(xdot * conj(x)) / |x|^2, set to 0 where |x|^2 < kPhaseFloor.
Eigen::VectorXd phase_rate(const Eigen::VectorXcd& x, const Eigen::VectorXcd& xdot);

} // namespace qnode
