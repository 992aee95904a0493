#include "qnode/multilevel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "qnode/quadrature.hpp"

namespace qnode {

namespace {

constexpr Complex kI{0.0, 1.0};

Eigen::MatrixXcd detuning_matrix(const MultiNodeParams& m) {
    const Eigen::Index n = m.n_levels();
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) d(k, k) = Complex(m.deltas[k], -m.gammas[k]);
    return d;
}

} // namespace

LevelDecomposition decompose(const MultiNodeParams& m) {
    validate(m);
    const Eigen::Index n = m.n_levels();

    LevelDecomposition d;
    d.v = m.branching;
    d.g_par = d.v.dot(m.couplings);  // V† G
    if (std::abs(d.g_par) < 1e-12 * m.couplings.norm()) {
        throw DegenerateBranching("decompose: |V† G| below 1e-12 ||G||");
    }

    // Deterministic complement basis: Gram-Schmidt over the canonical axes
    // ordered by |V_i| descending (ties by index); axes that project to zero
    // are skipped.
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return std::abs(d.v[a]) > std::abs(d.v[b]);
    });

    d.w.resize(n, n - 1);
    Eigen::Index built = 0;
    for (Eigen::Index axis : order) {
        if (built == n - 1) break;
        Eigen::VectorXcd cand = Eigen::VectorXcd::Zero(n);
        cand[axis] = 1.0;
        cand -= d.v * d.v.dot(cand);
        for (Eigen::Index j = 0; j < built; ++j) {
            cand -= d.w.col(j) * d.w.col(j).dot(cand);
        }
        // second pass for orthogonality at round-off level
        cand -= d.v * d.v.dot(cand);
        for (Eigen::Index j = 0; j < built; ++j) {
            cand -= d.w.col(j) * d.w.col(j).dot(cand);
        }
        const double nrm = cand.norm();
        if (nrm < 1e-12) continue;
        d.w.col(built++) = cand / nrm;
    }
    if (built != n - 1) {
        throw InvalidArgument("decompose: failed to build complement basis");
    }

    const Eigen::MatrixXcd dm = detuning_matrix(m);
    d.g_perp = d.w.adjoint() * m.couplings;
    d.delta_par_par = d.v.dot(dm * d.v);
    d.delta_perp_par = d.v.adjoint() * dm * d.w;
    d.delta_par_perp = d.w.adjoint() * (dm * d.v);
    d.delta_perp_perp = d.w.adjoint() * dm * d.w;
    d.m = d.delta_perp_perp -
          (d.delta_par_perp * d.g_perp.adjoint()) / std::conj(d.g_par);
    return d;
}

DarkStateReport dark_state_check(const LevelDecomposition& d, double tol_dark) {
    DarkStateReport rep;
    if (d.m.rows() == 0) return rep;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(d.m, /*computeEigenvectors=*/false);
    rep.eigenvalues = solver.eigenvalues();
    double radius = 0.0;
    for (Eigen::Index k = 0; k < rep.eigenvalues.size(); ++k) {
        radius = std::max(radius, std::abs(rep.eigenvalues[k]));
    }
    const double tol = tol_dark > 0.0 ? tol_dark : kDarkTolRel * std::max(1.0, radius);
    for (Eigen::Index k = 0; k < rep.eigenvalues.size(); ++k) {
        if (std::abs(std::imag(rep.eigenvalues[k])) < tol) rep.flagged.push_back(k);
    }
    return rep;
}

namespace {

struct MultiCore {
    LevelDecomposition dec;
    MultiTrajectory traj;
    FeasibilityReport report;
    Eigen::VectorXd loss_rate;  // Im(R† D R) series, <= 0
    double eta = 1.0;           // generation only
};

// Integrates R_perp' = -i m R_perp + F(t),
// F = -i G_perp g + (D_par_perp / conj(G_par)) y, sources linearly
// interpolated at half steps, R_perp(t_start) = 0.
Eigen::MatrixXcd integrate_r_perp(const LevelDecomposition& d, const TimeGrid& grid,
                                  const Eigen::VectorXcd& g, const Eigen::VectorXcd& y) {
    const Eigen::Index nc = d.m.rows();
    const Eigen::Index n = grid.n_points;
    Eigen::MatrixXcd r_perp = Eigen::MatrixXcd::Zero(nc, n);
    if (nc == 0) return r_perp;

    const double dt = grid.dt;
    const Eigen::VectorXcd force_g = -kI * d.g_perp;
    const Eigen::VectorXcd force_y = d.delta_par_perp / std::conj(d.g_par);

    Eigen::VectorXcd state = Eigen::VectorXcd::Zero(nc);
    auto deriv = [&](const Eigen::VectorXcd& x, Complex gs, Complex ys) -> Eigen::VectorXcd {
        return -kI * (d.m * x) + force_g * gs + force_y * ys;
    };
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const Complex g0s = g[k], g1s = g[k + 1], gh = 0.5 * (g0s + g1s);
        const Complex y0s = y[k], y1s = y[k + 1], yh = 0.5 * (y0s + y1s);
        const Eigen::VectorXcd k1 = deriv(state, g0s, y0s);
        const Eigen::VectorXcd k2 = deriv(state + 0.5 * dt * k1, gh, yh);
        const Eigen::VectorXcd k3 = deriv(state + 0.5 * dt * k2, gh, yh);
        const Eigen::VectorXcd k4 = deriv(state + dt * k3, g1s, y1s);
        state += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        r_perp.col(k + 1) = state;
    }
    return r_perp;
}

void fill_window_and_verdict(FeasibilityReport& rep, const Eigen::VectorXd& cum,
                             const TimeGrid& grid, bool exclude_upper_tail) {
    const Eigen::Index n = cum.size();
    const double total = cum[n - 1];
    rep.window_lo = 1;
    while (rep.window_lo <= n - 2 && !(cum[rep.window_lo] > kCumulativeStart)) ++rep.window_lo;
    rep.window_hi = n - 2;
    if (exclude_upper_tail) {
        while (rep.window_hi >= rep.window_lo &&
               !(total - cum[rep.window_hi] > kCumulativeStart)) {
            --rep.window_hi;
        }
    }
    rep.feasible = rep.window_lo <= rep.window_hi;
    rep.min_margin = 0.0;
    rep.argmin_t = grid.t_start;
    if (!rep.feasible) return;
    Eigen::Index arg = rep.window_lo;
    for (Eigen::Index k = rep.window_lo; k <= rep.window_hi; ++k) {
        if (rep.margin[k] < rep.margin[arg]) arg = k;
    }
    rep.min_margin = rep.margin[arg];
    rep.argmin_t = grid.t(arg);
    rep.feasible = rep.min_margin > 0.0;
}

MultiCore multi_core(const PhotonEnvelope& env, const MultiNodeParams& m, TransferMode mode) {
    validate(m);
    if (!(m.kappa > 0.0)) throw InvalidArgument("multilevel: kappa must be > 0");
    const Eigen::Index n = env.size();
    const Eigen::Index nl = m.n_levels();
    const double dt = env.grid.dt;
    const double sqrt_kappa = std::sqrt(m.kappa);

    MultiCore core;
    core.dec = decompose(m);
    const LevelDecomposition& d = core.dec;

    // eta = 1 pass; for generation the excited amplitudes scale as sqrt(eta),
    // so the lossy fixed point is resolved afterwards and the trajectory
    // rescaled in place.
    const double c_half = (mode == TransferMode::trap ? (m.kappa - m.gamma_c)
                                                      : -(m.kappa + m.gamma_c)) / 2.0;
    Eigen::VectorXcd g = env.values / sqrt_kappa;
    Eigen::VectorXcd y = env.derivatives / sqrt_kappa - c_half * g;

    Eigen::MatrixXcd r_perp = integrate_r_perp(d, env.grid, g, y);
    Eigen::VectorXcd r_par(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Complex coupling_perp =
            d.g_perp.size() > 0 ? d.g_perp.dot(r_perp.col(k)) : Complex(0.0, 0.0);
        r_par[k] = kI * (y[k] + kI * coupling_perp) / std::conj(d.g_par);
    }

    Eigen::MatrixXcd big_r(nl, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        big_r.col(k) = d.v * r_par[k];
        if (d.w.cols() > 0) big_r.col(k) += d.w * r_perp.col(k);
    }

    core.loss_rate.resize(n);
    Eigen::VectorXd pop(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        Complex quad(0.0, 0.0);
        double p = 0.0;
        for (Eigen::Index j = 0; j < nl; ++j) {
            const double mag2 = std::norm(big_r(j, k));
            quad += Complex(m.deltas[j], -m.gammas[j]) * mag2;
            p += mag2;
        }
        core.loss_rate[k] = std::imag(quad);
        pop[k] = p;
    }

    const Eigen::VectorXd a2 = env.values.cwiseAbs2();
    const Eigen::VectorXd cum = cumulative_trapezoid(a2, dt);
    const Eigen::VectorXd loss_cum = cumulative_trapezoid(core.loss_rate, dt);

    if (mode == TransferMode::generate) {
        const double l1 = -2.0 * loss_cum[n - 1];
        const double denom = 1.0 + m.gamma_c / m.kappa + l1;
        if (!std::isfinite(denom) || denom < 1.0) {
            throw NoRootInUnitInterval("eta_gen_n: no efficiency in (0, 1]");
        }
        core.eta = 1.0 / denom;
        const double s = std::sqrt(core.eta);
        g *= s;
        y *= s;
        r_par *= s;
        r_perp *= s;
        big_r *= s;
        pop *= core.eta;

        core.report.margin.resize(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            core.report.margin[k] = 1.0 - core.eta * (1.0 + m.gamma_c / m.kappa) * cum[k] +
                                    2.0 * core.eta * loss_cum[k] -
                                    core.eta * a2[k] / m.kappa - pop[k];
        }
        core.loss_rate *= core.eta;
        fill_window_and_verdict(core.report, cum, env.grid, true);
        core.report.predicted_efficiency = core.eta;
    } else {
        core.report.margin.resize(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            core.report.margin[k] = (1.0 - m.gamma_c / m.kappa) * cum[k] +
                                    2.0 * loss_cum[k] - a2[k] / m.kappa - pop[k];
        }
        fill_window_and_verdict(core.report, cum, env.grid, false);
        if (m.gamma_c >= m.kappa) core.report.feasible = false;
        if (core.report.feasible) {
            core.report.predicted_efficiency = core.report.margin[n - 1];
        }
    }

    core.traj.grid = env.grid;
    core.traj.g = std::move(g);
    core.traj.y = std::move(y);
    core.traj.r_par = std::move(r_par);
    core.traj.r_perp = std::move(r_perp);
    core.traj.R = std::move(big_r);
    return core;
}

MultiSynthesisResult synthesize_impl(const PhotonEnvelope& env, const MultiNodeParams& m,
                                     TransferMode mode) {
    MultiCore core = multi_core(env, m, mode);
    if (!core.report.feasible) {
        throw Infeasible(std::string(mode == TransferMode::trap ? "synthesize_trap_n"
                                                                : "synthesize_gen_n") +
                         ": criterion fails, min margin " +
                         std::to_string(core.report.min_margin));
    }
    const LevelDecomposition& d = core.dec;
    const MultiTrajectory& traj = core.traj;
    const Eigen::VectorXd& margin = core.report.margin;
    const Eigen::Index n = env.size();
    const double dt = env.grid.dt;

    const Eigen::VectorXd cum = cumulative_norm(env);
    Eigen::Array<bool, Eigen::Dynamic, 1> active(n);
    Eigen::Index phase_from = 0;
    if (mode == TransferMode::trap) {
        Eigen::Index first = n - 1;
        for (Eigen::Index k = 0; k < n; ++k) {
            active[k] = cum[k] > kCumulativeStart;
            if (active[k] && k < first) first = k;
        }
        phase_from = first;
    } else {
        for (Eigen::Index k = 0; k < n; ++k) active[k] = margin[k] >= kPulseCutoff;
    }

    const Eigen::VectorXcd r_par_dot = finite_difference_4(traj.r_par, dt);
    const Eigen::VectorXd phi_rpar_rate = phase_rate(traj.r_par, r_par_dot);

    Eigen::VectorXd phi_e_rate = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        if (!active[k]) continue;
        Complex cross = traj.g[k] * d.g_par;
        if (d.w.cols() > 0) cross += (d.delta_perp_par * traj.r_perp.col(k))(0);
        phi_e_rate[k] = (std::norm(traj.r_par[k]) *
                             (std::real(d.delta_par_par) + phi_rpar_rate[k]) +
                         std::real(cross * std::conj(traj.r_par[k]))) /
                        margin[k];
    }
    Eigen::VectorXd phi_e = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = phase_from + 1; k < n; ++k) {
        phi_e[k] = phi_e[k - 1] + 0.5 * dt * (phi_e_rate[k - 1] + phi_e_rate[k]);
    }

    Eigen::VectorXcd e(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        e[k] = std::polar(std::sqrt(std::max(margin[k], 0.0)), phi_e[k]);
    }

    Eigen::VectorXcd omega = Eigen::VectorXcd::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        if (!active[k]) continue;
        Complex numerator = r_par_dot[k] + kI * d.delta_par_par * traj.r_par[k] +
                            kI * traj.g[k] * d.g_par;
        if (d.w.cols() > 0) {
            numerator += kI * (d.delta_perp_par * traj.r_perp.col(k))(0);
        }
        omega[k] = 2.0 * kI * numerator / e[k];
    }

    MultiSynthesisResult res;
    res.pulse = pulse_from_complex(env.grid, omega);
    res.traj = std::move(core.traj);
    res.traj.e = std::move(e);
    res.margin = core.report.margin;
    res.efficiency = mode == TransferMode::trap ? margin[n - 1] : core.eta;
    res.mode = mode;
    res.dark = dark_state_check(d);
    res.dark_warning = res.dark.any_flagged();
    return res;
}

} // namespace

FeasibilityReport margin_trap_n(const PhotonEnvelope& env, const MultiNodeParams& m) {
    return multi_core(env, m, TransferMode::trap).report;
}

FeasibilityReport margin_gen_n(const PhotonEnvelope& env, const MultiNodeParams& m) {
    return multi_core(env, m, TransferMode::generate).report;
}

MultiSynthesisResult synthesize_trap_n(const PhotonEnvelope& env, const MultiNodeParams& m) {
    return synthesize_impl(env, m, TransferMode::trap);
}

MultiSynthesisResult synthesize_gen_n(const PhotonEnvelope& env, const MultiNodeParams& m) {
    return synthesize_impl(env, m, TransferMode::generate);
}

double eta_trap_n(const MultiTrajectory& traj, const MultiNodeParams& m) {
    validate(m);
    const Eigen::Index n = traj.R.cols();
    Eigen::VectorXd loss(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < m.n_levels(); ++j) {
            acc -= m.gammas[j] * std::norm(traj.R(j, k));
        }
        loss[k] = acc;
    }
    return 1.0 - m.gamma_c / m.kappa + 2.0 * trapezoid(loss, traj.grid.dt);
}

double eta_gen_n(const PhotonEnvelope& env, const MultiNodeParams& m) {
    return multi_core(env, m, TransferMode::generate).eta;
}

} // namespace qnode
