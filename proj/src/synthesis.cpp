#include "qnode/synthesis.hpp"

#include <cmath>

#include "qnode/quadrature.hpp"

namespace qnode {

Eigen::VectorXcd ControlPulse::complex_series() const {
    Eigen::VectorXcd out(magnitude.size());
    for (Eigen::Index k = 0; k < magnitude.size(); ++k) out[k] = value(k);
    return out;
}

ControlPulse pulse_from_complex(const TimeGrid& grid, const Eigen::VectorXcd& omega) {
    const Eigen::Index n = omega.size();
    if (n != grid.n_points) throw InvalidArgument("pulse_from_complex: size mismatch");

    ControlPulse pulse;
    pulse.grid = grid;
    pulse.magnitude = omega.cwiseAbs();
    pulse.phase.resize(n);

    // Phase is defined only on the support; zero-magnitude samples inherit
    // the nearest defined phase so unwrapping never sees artificial jumps.
    double last = 0.0;
    bool seen = false;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (pulse.magnitude[k] > 0.0) {
            last = std::arg(omega[k]);
            if (!seen) {
                for (Eigen::Index j = 0; j < k; ++j) pulse.phase[j] = last;
                seen = true;
            }
        }
        pulse.phase[k] = last;
    }
    pulse.phase = unwrap_phase(pulse.phase);
    return pulse;
}

namespace {

// Shared tail of both constructions: phase of e, pulse assembly, result.
//
// margin      |e(t)|^2 series
// active      samples where the pulse formula applies (elsewhere Omega = 0)
// phase_from  first index of the phase integration (Phi_e = 0 there)
SynthesisResult assemble(const PhotonEnvelope& env, const NodeParams& p,
                         const Eigen::VectorXcd& g, const Eigen::VectorXcd& gdot,
                         const Eigen::VectorXcd& r, const Eigen::VectorXd& margin,
                         const Eigen::Array<bool, Eigen::Dynamic, 1>& active,
                         Eigen::Index phase_from, TransferMode mode, double efficiency) {
    const Eigen::Index n = env.size();
    const double dt = env.grid.dt;

    const Eigen::VectorXcd rdot = finite_difference_4(r, dt);
    const Eigen::VectorXd phi_g_rate = phase_rate(g, gdot);
    const Eigen::VectorXd phi_r_rate = phase_rate(r, rdot);

    Eigen::VectorXd phi_e_rate = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        if (!active[k]) continue;
        phi_e_rate[k] = (std::norm(r[k]) * (phi_r_rate[k] + p.delta) -
                         std::norm(g[k]) * phi_g_rate[k]) /
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

    const Complex i_unit(0.0, 1.0);
    Eigen::VectorXcd omega = Eigen::VectorXcd::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        if (!active[k]) continue;
        const Complex numerator =
            rdot[k] + (p.gamma_sp / 2.0 + i_unit * p.delta) * r[k] + i_unit * p.g0 * g[k];
        omega[k] = 2.0 * i_unit * numerator / e[k];
    }

    SynthesisResult res;
    res.pulse = pulse_from_complex(env.grid, omega);
    res.g_traj = g;
    res.r_traj = r;
    res.e_traj = e;
    res.efficiency = efficiency;
    res.mode = mode;
    return res;
}

} // namespace

SynthesisResult synthesize_trap(const PhotonEnvelope& env, const NodeParams& p) {
    const FeasibilityReport rep = margin_trap(env, p);
    if (!rep.feasible) {
        throw Infeasible("synthesize_trap: criterion fails, min margin " +
                         std::to_string(rep.min_margin) + " at t = " +
                         std::to_string(rep.argmin_t));
    }
    const Eigen::Index n = env.size();
    const double sqrt_kappa = std::sqrt(p.kappa);
    const double cm = (p.kappa - p.gamma_c) / 2.0;
    const Complex i_unit(0.0, 1.0);

    const Eigen::VectorXcd g = env.values / sqrt_kappa;
    const Eigen::VectorXcd gdot = env.derivatives / sqrt_kappa;
    const Eigen::VectorXcd r = (i_unit / std::conj(p.g0)) * (gdot - cm * g);

    // The pulse (and the phase of e) start once a minimal photon fraction has
    // arrived; numerator and denominator of the pulse formula vanish together
    // before that.
    const Eigen::VectorXd cum = cumulative_norm(env);
    Eigen::Array<bool, Eigen::Dynamic, 1> active(n);
    Eigen::Index first = n - 1;
    for (Eigen::Index k = 0; k < n; ++k) {
        active[k] = cum[k] > kCumulativeStart;
        if (active[k] && k < first) first = k;
    }

    return assemble(env, p, g, gdot, r, rep.margin, active, first, TransferMode::trap,
                    rep.margin[n - 1]);
}

SynthesisResult synthesize_gen(const PhotonEnvelope& env, const NodeParams& p) {
    const FeasibilityReport rep = margin_gen(env, p);
    if (!rep.feasible) {
        throw Infeasible("synthesize_gen: criterion fails, min margin " +
                         std::to_string(rep.min_margin) + " at t = " +
                         std::to_string(rep.argmin_t));
    }
    const Eigen::Index n = env.size();
    const double eta = *rep.predicted_efficiency;
    const double scale = std::sqrt(eta / p.kappa);
    const double cp = (p.kappa + p.gamma_c) / 2.0;
    const Complex i_unit(0.0, 1.0);

    const Eigen::VectorXcd g = scale * env.values;
    const Eigen::VectorXcd gdot = scale * env.derivatives;
    const Eigen::VectorXcd r = (i_unit / std::conj(p.g0)) * (gdot + cp * g);

    // e starts at 1 and is driven to 0; the pulse is switched off once the
    // residual |e|^2 drops below the cutoff, where the formula divides noise
    // by noise.
    Eigen::Array<bool, Eigen::Dynamic, 1> active(n);
    for (Eigen::Index k = 0; k < n; ++k) active[k] = rep.margin[k] >= kPulseCutoff;

    return assemble(env, p, g, gdot, r, rep.margin, active, 0, TransferMode::generate, eta);
}

double eta_trap(const PhotonEnvelope& env, const NodeParams& p) {
    validate(p);
    if (!(p.kappa > 0.0)) throw InvalidArgument("eta_trap: kappa must be > 0");
    const double g0s = p.g0_sq();
    const double moment = trapezoid(env.derivatives.cwiseAbs2().eval(), env.grid.dt);
    return (1.0 - p.gamma_c / p.kappa) *
               (1.0 - p.gamma_sp * (p.kappa - p.gamma_c) / (4.0 * g0s)) -
           (p.gamma_sp / (p.kappa * g0s)) * moment;
}

double eta_gen(const PhotonEnvelope& env, const NodeParams& p) {
    validate(p);
    if (!(p.kappa > 0.0)) throw InvalidArgument("eta_gen: kappa must be > 0");
    const double g0s = p.g0_sq();
    const double moment = trapezoid(env.derivatives.cwiseAbs2().eval(), env.grid.dt);
    return 1.0 / ((1.0 + p.gamma_c / p.kappa) *
                      (1.0 + p.gamma_sp * (p.kappa + p.gamma_c) / (4.0 * g0s)) +
                  (p.gamma_sp / (p.kappa * g0s)) * moment);
}

ControlPulse adiabatic_pulse(const PhotonEnvelope& env, const NodeParams& p) {
    validate(p);
    if (!(p.kappa > 0.0)) throw InvalidArgument("adiabatic_pulse: kappa must be > 0");
    for (Eigen::Index k = 0; k < env.size(); ++k) {
        if (std::abs(std::imag(env.values[k])) > 1e-10) {
            throw ChirpedInput("adiabatic_pulse: envelope must be real (chirp-free)");
        }
    }
    const Eigen::VectorXd cum = cumulative_norm(env);
    const double g0 = std::abs(p.g0);

    ControlPulse pulse;
    pulse.grid = env.grid;
    pulse.magnitude = Eigen::VectorXd::Zero(env.size());
    pulse.phase = Eigen::VectorXd::Zero(env.size());
    for (Eigen::Index k = 0; k < env.size(); ++k) {
        if (cum[k] > kCumulativeStart) {
            pulse.magnitude[k] =
                2.0 * g0 * std::abs(env.values[k]) / std::sqrt(p.kappa * cum[k]);
        }
    }
    return pulse;
}

AdiabaticInversion envelope_from_adiabatic_pulse(const ControlPulse& pulse,
                                                 const NodeParams& p) {
    validate(p);
    if (!(p.kappa > 0.0)) {
        throw InvalidArgument("envelope_from_adiabatic_pulse: kappa must be > 0");
    }
    const Eigen::Index n = pulse.grid.n_points;
    const double dt = pulse.grid.dt;
    const double ratio = p.kappa / p.g0_sq();

    const Eigen::VectorXd half_sq = (pulse.magnitude / 2.0).cwiseAbs2();
    const Eigen::VectorXd cum = cumulative_trapezoid(half_sq, dt);
    const double total = cum[n - 1];

    Eigen::VectorXd density(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        density[k] = ratio * half_sq[k] * std::exp(-ratio * (total - cum[k]));
    }

    AdiabaticInversion out;
    out.norm_before_renormalization = trapezoid(density, dt);

    PhotonEnvelope env;
    env.grid = pulse.grid;
    env.family = EnvelopeFamily::tabulated;
    env.values.resize(n);
    if (out.norm_before_renormalization > 0.0) {
        const double scale = 1.0 / out.norm_before_renormalization;
        for (Eigen::Index k = 0; k < n; ++k) {
            env.values[k] = std::sqrt(density[k] * scale);
        }
    } else {
        env.values.setZero();
    }
    // Built directly: a reconstruction is reported as-is, without the
    // edge-decay gate applied to scenario envelopes.
    env.derivatives = finite_difference_4(env.values, dt);
    out.envelope = std::move(env);
    return out;
}

} // namespace qnode
