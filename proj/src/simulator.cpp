#include "qnode/simulator.hpp"

#include <cmath>

#include "qnode/quadrature.hpp"

namespace qnode {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_step(double dt, double fastest_rate) {
    if (dt * fastest_rate > 0.1) {
        throw StepTooCoarse("simulate: dt * fastest rate = " +
                            std::to_string(dt * fastest_rate) + " exceeds 0.1");
    }
}

Budgets make_budgets(const Eigen::VectorXd& ain2, const Eigen::VectorXcd& aout,
                     double spurious_rated, double spontaneous_integrated,
                     double node_final, double node_initial, double dt) {
    Budgets b;
    b.input = trapezoid(ain2, dt);
    b.emitted = trapezoid(aout.cwiseAbs2().eval(), dt);
    b.spurious_cavity = spurious_rated;
    b.spontaneous = spontaneous_integrated;
    b.node_prob = node_final;
    b.initial = node_initial;
    return b;
}

} // namespace

InputField InputField::zero(const TimeGrid& grid) {
    return {grid, Eigen::VectorXcd::Zero(grid.n_points)};
}

InputField InputField::from_envelope(const PhotonEnvelope& env) {
    return {env.grid, env.values};
}

InputField InputField::from_series(const TimeGrid& grid, Eigen::VectorXcd series) {
    if (series.size() != grid.n_points) {
        throw GridMismatch("InputField: series length does not match grid");
    }
    return {grid, std::move(series)};
}

SimOutcome simulate(const InputField& input, const ControlPulse& pulse,
                    const NodeParams& p, const Eigen::Vector3cd& init) {
    validate(p);
    if (!(input.grid == pulse.grid)) {
        throw GridMismatch("simulate: input field and pulse grids differ");
    }
    const TimeGrid& grid = input.grid;
    const Eigen::Index n = grid.n_points;
    const double dt = grid.dt;

    const double max_omega = pulse.magnitude.size() > 0 ? pulse.magnitude.maxCoeff() : 0.0;
    check_step(dt, std::max({max_omega, std::abs(p.g0), p.kappa, p.gamma_c, p.gamma_sp,
                             std::abs(p.delta)}));
    if (init.norm() > 1.0 + 1e-12) {
        throw InvalidArgument("simulate: initial state norm exceeds 1");
    }

    const Eigen::VectorXcd omega = pulse.complex_series();
    const double sqrt_kappa = std::sqrt(p.kappa);
    const Complex decay_g = -0.5 * (p.kappa + p.gamma_c);
    const Complex decay_r = -(p.gamma_sp / 2.0 + kI * p.delta);

    auto deriv = [&](const Eigen::Vector3cd& s, Complex ain, Complex om) -> Eigen::Vector3cd {
        Eigen::Vector3cd d;
        d[0] = -kI * std::conj(p.g0) * s[1] + decay_g * s[0] + sqrt_kappa * ain;
        d[1] = decay_r * s[1] - kI * p.g0 * s[0] - kI * (om / 2.0) * s[2];
        d[2] = -kI * (std::conj(om) / 2.0) * s[1];
        return d;
    };

    SimOutcome out;
    out.grid = grid;
    out.g.resize(n);
    out.r.resize(n);
    out.e.resize(n);
    out.alpha_out.resize(n);
    out.node_prob.resize(n);

    Eigen::Vector3cd state = init;
    for (Eigen::Index k = 0; k < n; ++k) {
        out.g[k] = state[0];
        out.r[k] = state[1];
        out.e[k] = state[2];
        out.alpha_out[k] = sqrt_kappa * state[0] - input.series[k];
        out.node_prob[k] = state.squaredNorm();
        if (k + 1 == n) break;

        const Complex a0 = input.series[k], a1 = input.series[k + 1], ah = 0.5 * (a0 + a1);
        const Complex o0 = omega[k], o1 = omega[k + 1], oh = 0.5 * (o0 + o1);
        const Eigen::Vector3cd k1 = deriv(state, a0, o0);
        const Eigen::Vector3cd k2 = deriv(state + 0.5 * dt * k1, ah, oh);
        const Eigen::Vector3cd k3 = deriv(state + 0.5 * dt * k2, ah, oh);
        const Eigen::Vector3cd k4 = deriv(state + dt * k3, a1, o1);
        state += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    out.budgets = make_budgets(
        input.series.cwiseAbs2(), out.alpha_out,
        p.gamma_c * trapezoid(out.g.cwiseAbs2().eval(), dt),
        p.gamma_sp * trapezoid(out.r.cwiseAbs2().eval(), dt),
        out.node_prob[n - 1], init.squaredNorm(), dt);
    return out;
}

MultiSimOutcome simulate_n(const InputField& input, const ControlPulse& pulse,
                           const MultiNodeParams& m, const MultiInit& init) {
    validate(m);
    if (!(input.grid == pulse.grid)) {
        throw GridMismatch("simulate_n: input field and pulse grids differ");
    }
    const TimeGrid& grid = input.grid;
    const Eigen::Index n = grid.n_points;
    const Eigen::Index nl = m.n_levels();
    const double dt = grid.dt;

    Eigen::VectorXcd r0 = init.r.size() > 0 ? init.r : Eigen::VectorXcd::Zero(nl);
    if (r0.size() != nl) throw InvalidArgument("simulate_n: init.r length mismatch");

    double fastest = std::max({pulse.magnitude.size() > 0 ? pulse.magnitude.maxCoeff() : 0.0,
                               m.kappa, m.gamma_c});
    for (Eigen::Index j = 0; j < nl; ++j) {
        fastest = std::max({fastest, std::abs(m.couplings[j]), std::abs(m.deltas[j]),
                            2.0 * m.gammas[j]});
    }
    check_step(dt, fastest);

    // state = (g, R_1..R_N, e)
    Eigen::VectorXcd state(nl + 2);
    state[0] = init.g;
    state.segment(1, nl) = r0;
    state[nl + 1] = init.e;
    const double initial_norm = state.squaredNorm();
    if (std::sqrt(initial_norm) > 1.0 + 1e-12) {
        throw InvalidArgument("simulate_n: initial state norm exceeds 1");
    }

    const Eigen::VectorXcd omega = pulse.complex_series();
    const double sqrt_kappa = std::sqrt(m.kappa);
    const Complex decay_g = -0.5 * (m.kappa + m.gamma_c);
    Eigen::VectorXcd complex_detuning(nl);
    for (Eigen::Index j = 0; j < nl; ++j) {
        complex_detuning[j] = Complex(m.deltas[j], -m.gammas[j]);
    }

    auto deriv = [&](const Eigen::VectorXcd& s, Complex ain, Complex om) -> Eigen::VectorXcd {
        Eigen::VectorXcd d(nl + 2);
        const auto r = s.segment(1, nl);
        d[0] = -kI * m.couplings.dot(r) + decay_g * s[0] + sqrt_kappa * ain;
        d.segment(1, nl) = -kI * complex_detuning.cwiseProduct(r) - kI * s[0] * m.couplings -
                           kI * (om / 2.0) * s[nl + 1] * m.branching;
        d[nl + 1] = -kI * (std::conj(om) / 2.0) * m.branching.dot(r);
        return d;
    };

    MultiSimOutcome out;
    out.grid = grid;
    out.g.resize(n);
    out.e.resize(n);
    out.R.resize(nl, n);
    out.alpha_out.resize(n);
    out.node_prob.resize(n);

    for (Eigen::Index k = 0; k < n; ++k) {
        out.g[k] = state[0];
        out.R.col(k) = state.segment(1, nl);
        out.e[k] = state[nl + 1];
        out.alpha_out[k] = sqrt_kappa * state[0] - input.series[k];
        out.node_prob[k] = state.squaredNorm();
        if (k + 1 == n) break;

        const Complex a0 = input.series[k], a1 = input.series[k + 1], ah = 0.5 * (a0 + a1);
        const Complex o0 = omega[k], o1 = omega[k + 1], oh = 0.5 * (o0 + o1);
        const Eigen::VectorXcd k1 = deriv(state, a0, o0);
        const Eigen::VectorXcd k2 = deriv(state + 0.5 * dt * k1, ah, oh);
        const Eigen::VectorXcd k3 = deriv(state + 0.5 * dt * k2, ah, oh);
        const Eigen::VectorXcd k4 = deriv(state + dt * k3, a1, o1);
        state += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    double spontaneous = 0.0;
    for (Eigen::Index j = 0; j < nl; ++j) {
        spontaneous +=
            2.0 * m.gammas[j] * trapezoid(out.R.row(j).cwiseAbs2().transpose().eval(), dt);
    }
    out.budgets = make_budgets(input.series.cwiseAbs2(), out.alpha_out,
                               m.gamma_c * trapezoid(out.g.cwiseAbs2().eval(), dt),
                               spontaneous, out.node_prob[n - 1], initial_norm, dt);
    return out;
}

double output_overlap(const Eigen::VectorXcd& a, const PhotonEnvelope& b) {
    if (a.size() != b.size()) throw GridMismatch("output_overlap: length mismatch");
    const double dt = b.grid.dt;
    const double na = trapezoid(a.cwiseAbs2().eval(), dt);
    if (!(na > 0.0)) throw ZeroField("output_overlap: first field has zero norm");
    const double nb = trapezoid(b.values.cwiseAbs2().eval(), dt);
    const Complex ip = trapezoid(a.conjugate().cwiseProduct(b.values).eval(), dt);
    return std::norm(ip) / (na * nb);
}

} // namespace qnode
