#include "qnode/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "qnode/errors.hpp"

namespace qnode {

double trapezoid(const Eigen::VectorXd& f, double dt) {
    const Eigen::Index n = f.size();
    if (n < 2) return 0.0;
    return dt * (f.sum() - 0.5 * (f[0] + f[n - 1]));
}

Complex trapezoid(const Eigen::VectorXcd& f, double dt) {
    const Eigen::Index n = f.size();
    if (n < 2) return {0.0, 0.0};
    return dt * (f.sum() - 0.5 * (f[0] + f[n - 1]));
}

Eigen::VectorXd cumulative_trapezoid(const Eigen::VectorXd& f, double dt) {
    const Eigen::Index n = f.size();
    Eigen::VectorXd out(n);
    if (n == 0) return out;
    out[0] = 0.0;
    for (Eigen::Index k = 1; k < n; ++k) {
        out[k] = out[k - 1] + 0.5 * dt * (f[k - 1] + f[k]);
    }
    return out;
}

Eigen::VectorXcd finite_difference_4(const Eigen::VectorXcd& f, double dt) {
    const Eigen::Index n = f.size();
    if (n < 3) throw InvalidArgument("finite_difference_4: need at least 3 samples");
    Eigen::VectorXcd d(n);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dt);
    d[1] = (f[2] - f[0]) / (2.0 * dt);
    for (Eigen::Index k = 2; k + 2 < n; ++k) {
        d[k] = (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]) / (12.0 * dt);
    }
    if (n >= 4) d[n - 2] = (f[n - 1] - f[n - 3]) / (2.0 * dt);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dt);
    return d;
}

Eigen::VectorXd unwrap_phase(Eigen::VectorXd phase) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (Eigen::Index k = 1; k < phase.size(); ++k) {
        const double jump = phase[k] - phase[k - 1];
        phase[k] -= two_pi * std::round(jump / two_pi);
    }
    return phase;
}

Eigen::VectorXd phase_rate(const Eigen::VectorXcd& x, const Eigen::VectorXcd& xdot) {
    if (x.size() != xdot.size()) throw InvalidArgument("phase_rate: size mismatch");
    Eigen::VectorXd out(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double mag2 = std::norm(x[k]);
        out[k] = mag2 < kPhaseFloor ? 0.0 : std::imag(xdot[k] * std::conj(x[k])) / mag2;
    }
    return out;
}

} // namespace qnode
