#include <doctest.h>

#include <cmath>

#include "qnode/quadrature.hpp"
#include "qnode/simulator.hpp"
#include "test_support.hpp"

using namespace qnode;

namespace {

ControlPulse zero_pulse(const TimeGrid& grid) {
    ControlPulse pulse;
    pulse.grid = grid;
    pulse.magnitude = Eigen::VectorXd::Zero(grid.n_points);
    pulse.phase = Eigen::VectorXd::Zero(grid.n_points);
    return pulse;
}

} // namespace

TEST_CASE("closed cavity: vacuum Rabi oscillation against the analytic solution") {
    const TimeGrid grid = TimeGrid::from_span(0.0, 20.0, 0.001);
    const NodeParams closed{0.0, 0.0, 0.0, {1.0, 0.0}, 0.0};
    const SimOutcome sim =
        simulate(InputField::zero(grid), zero_pulse(grid), closed,
                 Eigen::Vector3cd(Complex(1, 0), Complex(0, 0), Complex(0, 0)));

    double worst = 0.0;
    for (Eigen::Index k = 0; k < grid.n_points; ++k) {
        const double t = grid.t(k);
        worst = std::max(worst, std::abs(std::norm(sim.r[k]) - std::pow(std::sin(t), 2)));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("empty cavity decays exponentially into the waveguide") {
    const TimeGrid grid = TimeGrid::from_span(0.0, 40.0, 0.002);
    // |g0| must stay nonzero for validation; 1e-8 leaves the atom dark at
    // the 1e-13 level over this span
    const NodeParams cavity{1.0, 0.0, 0.0, {1e-8, 0.0}, 0.0};
    const SimOutcome sim =
        simulate(InputField::zero(grid), zero_pulse(grid), cavity,
                 Eigen::Vector3cd(Complex(1, 0), Complex(0, 0), Complex(0, 0)));

    double worst = 0.0;
    for (Eigen::Index k = 0; k < grid.n_points; ++k) {
        worst = std::max(worst,
                         std::abs(std::norm(sim.g[k]) - std::exp(-cavity.kappa * grid.t(k))));
    }
    CHECK(worst < 1e-6);
    CHECK(sim.budgets.emitted == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sim.budgets.flux_residual() < 1e-6);
}

TEST_CASE("flux balance holds with every loss channel open") {
    const TimeGrid grid = TimeGrid::from_span(-60.0, 60.0, 0.005);
    const PhotonEnvelope env = make_gaussian(0.0, 6.0, grid);
    const NodeParams p{1.0, 0.3, 0.4, {2.0, 0.5}, 1.0};

    ControlPulse pulse = zero_pulse(grid);
    for (Eigen::Index k = 0; k < grid.n_points; ++k) {
        const double t = grid.t(k);
        pulse.magnitude[k] = 1.5 * std::exp(-t * t / 200.0);
        pulse.phase[k] = 0.3 * t;
    }

    const SimOutcome sim = simulate(InputField::from_envelope(env), pulse, p,
                                    Eigen::Vector3cd::Zero());
    CHECK(sim.budgets.flux_residual() < 1e-6);
    CHECK(sim.budgets.input == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("fourth-order convergence on step halving") {
    const NodeParams closed{0.0, 0.0, 0.0, {1.0, 0.0}, 0.0};
    auto run_dt = [&](double dt) {
        const TimeGrid grid = TimeGrid::from_span(0.0, 10.0, dt);
        return simulate(InputField::zero(grid), zero_pulse(grid), closed,
                        Eigen::Vector3cd(Complex(1, 0), Complex(0, 0), Complex(0, 0)));
    };
    const SimOutcome coarse = run_dt(0.02);
    const SimOutcome halved = run_dt(0.01);
    const SimOutcome reference = run_dt(0.0025);

    auto error_against_ref = [&](const SimOutcome& sim, Eigen::Index stride_ref,
                                 Eigen::Index stride) {
        double worst = 0.0;
        for (Eigen::Index k = 0; k < sim.g.size(); k += stride) {
            const Eigen::Index kr = k * stride_ref;
            worst = std::max({worst, std::abs(sim.g[k] - reference.g[kr]),
                              std::abs(sim.r[k] - reference.r[kr])});
        }
        return worst;
    };
    const double e_coarse = error_against_ref(coarse, 8, 1);
    const double e_halved = error_against_ref(halved, 4, 1);
    CHECK(e_coarse / e_halved >= 8.0);
}

TEST_CASE("a silent control leaves the stored excitation untouched") {
    const TimeGrid grid = TimeGrid::from_span(-30.0, 30.0, 0.01);
    const PhotonEnvelope env = make_gaussian(0.0, 3.0, grid);
    const NodeParams p{1.0, 0.1, 0.2, {2.0, 0.0}, 0.5};
    const Complex e0 = std::polar(0.6, 1.1);
    const SimOutcome sim = simulate(InputField::from_envelope(env), zero_pulse(grid), p,
                                    Eigen::Vector3cd(Complex(0, 0), Complex(0, 0), e0));
    for (Eigen::Index k = 0; k < grid.n_points; ++k) {
        CHECK(std::abs(sim.e[k] - e0) <= 1e-12);
    }
}

TEST_CASE("dynamics are jointly linear in initial state and input field") {
    const TimeGrid grid = TimeGrid::from_span(0.0, 15.0, 0.005);
    const NodeParams p{1.0, 0.05, 0.3, {1.5, 0.7}, 0.4};

    ControlPulse pulse = zero_pulse(grid);
    for (Eigen::Index k = 0; k < grid.n_points; ++k) {
        pulse.magnitude[k] = 0.8 + 0.3 * std::sin(0.21 * grid.t(k));
        pulse.phase[k] = 0.1 * grid.t(k);
    }

    Eigen::VectorXcd field1(grid.n_points), field2(grid.n_points);
    for (Eigen::Index k = 0; k < grid.n_points; ++k) {
        const double t = grid.t(k);
        field1[k] = Complex(0.08 * std::exp(-std::pow(t - 5.0, 2) / 4.0), 0.0);
        field2[k] = Complex(0.0, 0.05 * std::exp(-std::pow(t - 8.0, 2) / 9.0));
    }
    const Eigen::Vector3cd init1(Complex(0.2, 0.1), Complex(0.0, -0.2), Complex(0.1, 0.0));
    const Eigen::Vector3cd init2(Complex(0.0, 0.0), Complex(0.15, 0.0), Complex(0.0, 0.2));
    const Complex a(0.7, -0.2), b(-0.4, 0.5);

    auto run = [&](const Eigen::VectorXcd& field, const Eigen::Vector3cd& init) {
        return simulate(InputField::from_series(grid, field), pulse, p, init);
    };
    const SimOutcome s1 = run(field1, init1);
    const SimOutcome s2 = run(field2, init2);
    const SimOutcome s12 = run(a * field1 + b * field2, a * init1 + b * init2);

    double worst = 0.0;
    for (Eigen::Index k = 0; k < grid.n_points; ++k) {
        worst = std::max({worst, std::abs(s12.g[k] - (a * s1.g[k] + b * s2.g[k])),
                          std::abs(s12.r[k] - (a * s1.r[k] + b * s2.r[k])),
                          std::abs(s12.e[k] - (a * s1.e[k] + b * s2.e[k]))});
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("grid mismatch and coarse steps are rejected") {
    const TimeGrid grid = TimeGrid::from_span(0.0, 10.0, 0.01);
    const TimeGrid other = TimeGrid::from_span(0.0, 10.0, 0.02);
    const NodeParams p{1.0, 0.0, 0.0, {1.0, 0.0}, 0.0};
    CHECK_THROWS_AS(simulate(InputField::zero(grid), zero_pulse(other), p,
                             Eigen::Vector3cd::Zero()),
                    GridMismatch);

    const NodeParams stiff{1.0, 0.0, 0.0, {20.0, 0.0}, 0.0};
    CHECK_THROWS_AS(simulate(InputField::zero(grid), zero_pulse(grid), stiff,
                             Eigen::Vector3cd::Zero()),
                    StepTooCoarse);
}

TEST_CASE("single-level dynamics are the N = 1 multilevel dynamics") {
    const TimeGrid grid = TimeGrid::from_span(-40.0, 40.0, 0.005);
    const PhotonEnvelope env = make_gaussian(0.0, 4.0, grid);
    const NodeParams p{1.0, 0.1, 0.3, {2.0, 0.4}, 0.8};

    ControlPulse pulse = zero_pulse(grid);
    for (Eigen::Index k = 0; k < grid.n_points; ++k) {
        pulse.magnitude[k] = 0.9 * std::exp(-std::pow(grid.t(k), 2) / 300.0);
        pulse.phase[k] = 0.05 * grid.t(k);
    }

    const SimOutcome single = simulate(InputField::from_envelope(env), pulse, p,
                                       Eigen::Vector3cd::Zero());
    MultiInit init;
    const MultiSimOutcome multi =
        simulate_n(InputField::from_envelope(env), pulse, embed_single_level(p), init);

    double worst = 0.0;
    for (Eigen::Index k = 0; k < grid.n_points; ++k) {
        worst = std::max({worst, std::abs(single.g[k] - multi.g[k]),
                          std::abs(single.r[k] - multi.R(0, k)),
                          std::abs(single.e[k] - multi.e[k])});
    }
    CHECK(worst < 1e-8);
    CHECK(std::abs(single.budgets.spontaneous - multi.budgets.spontaneous) < 1e-10);
}

TEST_CASE("multilevel with all couplings off decays like an empty cavity") {
    const TimeGrid grid = TimeGrid::from_span(0.0, 30.0, 0.002);
    MultiNodeParams m;
    m.kappa = 1.0;
    m.gamma_c = 0.0;
    m.couplings = Eigen::VectorXcd::Constant(2, Complex(1e-9, 0.0));
    m.branching = Eigen::VectorXcd::Zero(2);
    m.branching[0] = 1.0;
    m.deltas = Eigen::VectorXd::Zero(2);
    m.gammas = Eigen::VectorXd::Zero(2);

    MultiInit init;
    init.g = 1.0;
    const MultiSimOutcome sim = simulate_n(InputField::zero(grid), zero_pulse(grid), m, init);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < grid.n_points; ++k) {
        worst = std::max(worst, std::abs(std::norm(sim.g[k]) - std::exp(-grid.t(k))));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("overlap metric: identity, scale invariance, displacement") {
    const TimeGrid grid = TimeGrid::from_span(-50.0, 50.0, 0.01);
    const double tau = 3.0;
    const PhotonEnvelope env = make_gaussian(0.0, tau, grid);

    CHECK(output_overlap(env.values, env) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(output_overlap((Complex(0.3, -1.2) * env.values).eval(), env) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // displaced copies: overlap falls as exp(-s^2 / (4 tau^2))
    const PhotonEnvelope shifted5 = make_gaussian(5.0 * tau, tau, grid);
    CHECK(output_overlap(shifted5.values, env) ==
          doctest::Approx(std::exp(-25.0 / 4.0)).epsilon(1e-6));
    const PhotonEnvelope shifted10 = make_gaussian(10.0 * tau, tau, grid);
    CHECK(output_overlap(shifted10.values, env) <= 1e-5);

    CHECK_THROWS_AS(output_overlap(Eigen::VectorXcd::Zero(grid.n_points), env), ZeroField);
}
