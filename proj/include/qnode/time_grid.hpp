#pragma once

#include <Eigen/Dense>

#include "qnode/errors.hpp"

namespace qnode {

/// Uniform time grid t_k = t_start + k*dt.
///
/// Every series in the library (envelope, pulse, trajectories) lives on one
/// shared grid; there is no interpolation between different grids.
struct TimeGrid {
    double t_start = 0.0;
    double dt = 0.0;
    Eigen::Index n_points = 0;

    double t(Eigen::Index k) const { return t_start + static_cast<double>(k) * dt; }
    double t_end() const { return t(n_points - 1); }

    Eigen::VectorXd times() const;

    bool operator==(const TimeGrid&) const = default;

    /// Grid covering [t_start, t_end]; the span must be an integer number of steps.
    static TimeGrid from_span(double t_start, double t_end, double dt);
};

/// Throws InvalidArgument unless dt > 0 and n_points >= 2.
void validate(const TimeGrid& grid);

} // namespace qnode
