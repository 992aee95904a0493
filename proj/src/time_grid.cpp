#include "qnode/time_grid.hpp"

#include <cmath>

namespace qnode {

Eigen::VectorXd TimeGrid::times() const {
    Eigen::VectorXd ts(n_points);
    for (Eigen::Index k = 0; k < n_points; ++k) ts[k] = t(k);
    return ts;
}

TimeGrid TimeGrid::from_span(double t_start, double t_end, double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("TimeGrid: dt must be positive");
    const double steps = (t_end - t_start) / dt;
    const auto n_steps = static_cast<Eigen::Index>(std::llround(steps));
    if (n_steps < 1 || std::abs(steps - static_cast<double>(n_steps)) > 1e-6) {
        throw InvalidArgument("TimeGrid: (t_end - t_start)/dt = " + std::to_string(steps) +
                              " is not a positive integer step count");
    }
    TimeGrid g{t_start, dt, n_steps + 1};
    validate(g);
    return g;
}

void validate(const TimeGrid& grid) {
    if (!(grid.dt > 0.0)) throw InvalidArgument("TimeGrid: dt must be positive");
    if (grid.n_points < 2) throw InvalidArgument("TimeGrid: need at least 2 points");
}

} // namespace qnode
