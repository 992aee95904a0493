#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qnode/quadrature.hpp"

using namespace qnode;

TEST_CASE("trapezoid matches closed forms") {
    const Eigen::Index n = 2001;
    const double dt = 1.0 / (n - 1);
    Eigen::VectorXd f(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double t = k * dt;
        f[k] = t * t;
    }
    CHECK(trapezoid(f, dt) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("cumulative trapezoid starts at zero and is monotone for nonnegative input") {
    Eigen::VectorXd f(5);
    f << 1.0, 0.5, 2.0, 0.0, 3.0;
    const Eigen::VectorXd cum = cumulative_trapezoid(f, 0.1);
    CHECK(cum[0] == 0.0);
    for (Eigen::Index k = 1; k < cum.size(); ++k) CHECK(cum[k] >= cum[k - 1]);
    CHECK(cum[cum.size() - 1] == doctest::Approx(trapezoid(f, 0.1)));
}

TEST_CASE("finite difference is fourth order in the interior") {
    auto error_at = [](double dt) {
        const Eigen::Index n = static_cast<Eigen::Index>(std::round(2.0 / dt)) + 1;
        Eigen::VectorXcd f(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const double t = -1.0 + k * dt;
            f[k] = Complex(std::sin(3.0 * t), std::cos(2.0 * t));
        }
        const Eigen::VectorXcd d = finite_difference_4(f, dt);
        double worst = 0.0;
        for (Eigen::Index k = 2; k + 2 < n; ++k) {
            const double t = -1.0 + k * dt;
            const Complex exact(3.0 * std::cos(3.0 * t), -2.0 * std::sin(2.0 * t));
            worst = std::max(worst, std::abs(d[k] - exact));
        }
        return worst;
    };
    const double e1 = error_at(1e-2);
    const double e2 = error_at(5e-3);
    CHECK(e1 / e2 > 12.0);  // ~16 for a fourth-order scheme
}

TEST_CASE("unwrap removes artificial pi-boundary flips") {
    Eigen::VectorXd phase(4);
    const double pi = std::numbers::pi;
    phase << pi - 0.01, -pi + 0.01, pi - 0.02, -pi + 0.05;
    const Eigen::VectorXd unwrapped = unwrap_phase(phase);
    for (Eigen::Index k = 1; k < unwrapped.size(); ++k) {
        CHECK(std::abs(unwrapped[k] - unwrapped[k - 1]) < pi);
    }
}

TEST_CASE("phase rate handles null amplitudes") {
    Eigen::VectorXcd x(3), xdot(3);
    x << Complex(0.0, 0.0), Complex(1.0, 0.0), Complex(0.0, 1.0);
    xdot << Complex(1.0, 1.0), Complex(0.0, 2.0), Complex(-3.0, 0.0);
    const Eigen::VectorXd rate = phase_rate(x, xdot);
    CHECK(rate[0] == 0.0);                       // below the floor
    CHECK(rate[1] == doctest::Approx(2.0));      // Im(xdot conj(x)) / |x|^2
    CHECK(rate[2] == doctest::Approx(3.0));
}
