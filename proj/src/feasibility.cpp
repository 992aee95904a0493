#include "qnode/feasibility.hpp"

#include <cmath>

#include "qnode/quadrature.hpp"

namespace qnode {

namespace {

// |adot - c * a|^2 series.
Eigen::VectorXd shifted_derivative_sq(const PhotonEnvelope& env, double c) {
    return (env.derivatives - c * env.values).cwiseAbs2();
}

// Interior indices whose cumulative norm is established; when
// exclude_upper_tail is set (generation) the mirrored condition is applied at
// the top end, where the margin tends to 0 by construction and truncation
// noise decides the sign.
void enforcement_window(const Eigen::VectorXd& cum, bool exclude_upper_tail,
                        Eigen::Index& lo, Eigen::Index& hi) {
    const Eigen::Index n = cum.size();
    const double total = cum[n - 1];
    lo = 1;
    while (lo <= n - 2 && !(cum[lo] > kCumulativeStart)) ++lo;
    hi = n - 2;
    if (exclude_upper_tail) {
        while (hi >= lo && !(total - cum[hi] > kCumulativeStart)) --hi;
    }
}

void fill_verdict(FeasibilityReport& rep, const PhotonEnvelope& env) {
    rep.feasible = rep.window_lo <= rep.window_hi;
    rep.min_margin = 0.0;
    rep.argmin_t = env.grid.t_start;
    if (rep.window_lo > rep.window_hi) return;
    Eigen::Index arg = rep.window_lo;
    double mn = rep.margin[arg];
    for (Eigen::Index k = rep.window_lo + 1; k <= rep.window_hi; ++k) {
        if (rep.margin[k] < mn) {
            mn = rep.margin[k];
            arg = k;
        }
    }
    rep.min_margin = mn;
    rep.argmin_t = env.grid.t(arg);
    rep.feasible = mn > 0.0;
}

void require_open_cavity(const NodeParams& p) {
    if (!(p.kappa > 0.0)) throw InvalidArgument("feasibility: kappa must be > 0");
}

} // namespace

FeasibilityReport margin_lossless(const PhotonEnvelope& env, const NodeParams& p) {
    validate(p);
    require_open_cavity(p);
    const double kappa = p.kappa;
    const double g0s = p.g0_sq();

    const Eigen::VectorXd a2 = env.values.cwiseAbs2();
    const Eigen::VectorXd cum = cumulative_trapezoid(a2, env.grid.dt);

    FeasibilityReport rep;
    rep.margin = cum - a2 / kappa - shifted_derivative_sq(env, kappa / 2.0) / (kappa * g0s);
    enforcement_window(cum, false, rep.window_lo, rep.window_hi);
    fill_verdict(rep, env);
    if (rep.feasible) rep.predicted_efficiency = 1.0;
    return rep;
}

FeasibilityReport margin_trap(const PhotonEnvelope& env, const NodeParams& p) {
    validate(p);
    require_open_cavity(p);
    const double kappa = p.kappa, gc = p.gamma_c, gsp = p.gamma_sp;
    const double g0s = p.g0_sq();
    const double dt = env.grid.dt;

    const Eigen::VectorXd a2 = env.values.cwiseAbs2();
    const Eigen::VectorXd ad2 = env.derivatives.cwiseAbs2();
    const Eigen::VectorXd cum = cumulative_trapezoid(a2, dt);
    const Eigen::VectorXd cum_d = cumulative_trapezoid(ad2, dt);

    const double lead = (1.0 - gc / kappa) * (1.0 - gsp * (kappa - gc) / (4.0 * g0s));
    FeasibilityReport rep;
    rep.margin = lead * cum - (gsp / (kappa * g0s)) * cum_d -
                 (a2 / kappa) * (1.0 - gsp * (kappa - gc) / (2.0 * g0s)) -
                 shifted_derivative_sq(env, (kappa - gc) / 2.0) / (kappa * g0s);
    enforcement_window(cum, false, rep.window_lo, rep.window_hi);
    fill_verdict(rep, env);
    if (gc >= kappa) rep.feasible = false;  // no disentangling pulse exists, any waveform
    if (rep.feasible) {
        rep.predicted_efficiency = lead - (gsp / (kappa * g0s)) * cum_d[cum_d.size() - 1];
    }
    return rep;
}

FeasibilityReport margin_gen(const PhotonEnvelope& env, const NodeParams& p) {
    validate(p);
    require_open_cavity(p);
    const double kappa = p.kappa, gc = p.gamma_c, gsp = p.gamma_sp;
    const double g0s = p.g0_sq();
    const double dt = env.grid.dt;

    const Eigen::VectorXd a2 = env.values.cwiseAbs2();
    const Eigen::VectorXd ad2 = env.derivatives.cwiseAbs2();
    const Eigen::VectorXd cum = cumulative_trapezoid(a2, dt);
    const Eigen::VectorXd cum_d = cumulative_trapezoid(ad2, dt);

    const double lead = (1.0 + gc / kappa) * (1.0 + gsp * (kappa + gc) / (4.0 * g0s));
    const Eigen::VectorXd accumulated =
        lead * cum + (gsp / (kappa * g0s)) * cum_d +
        (a2 / kappa) * (1.0 + gsp * (kappa + gc) / (2.0 * g0s)) +
        shifted_derivative_sq(env, -(kappa + gc) / 2.0) / (kappa * g0s);

    const double eta = 1.0 / (lead + (gsp / (kappa * g0s)) * cum_d[cum_d.size() - 1]);

    FeasibilityReport rep;
    rep.margin = 1.0 - eta * accumulated.array();
    enforcement_window(cum, true, rep.window_lo, rep.window_hi);
    fill_verdict(rep, env);
    rep.predicted_efficiency = eta;
    return rep;
}

} // namespace qnode
