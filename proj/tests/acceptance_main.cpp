// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. An optional argument (e.g. "A3") runs a single criterion.

#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qnode/envelope.hpp"
#include "qnode/feasibility.hpp"
#include "qnode/multilevel.hpp"
#include "qnode/node_params.hpp"
#include "qnode/quadrature.hpp"
#include "qnode/simulator.hpp"
#include "qnode/synthesis.hpp"

using namespace qnode;

namespace {

struct Criterion {
    std::string id;
    std::string title;
    std::function<bool(std::ostream&)> body;
};

std::vector<double> g_flux_residuals;  // collected across every simulation below

void note_flux(const Budgets& budgets) {
    g_flux_residuals.push_back(budgets.flux_residual());
}

const NodeParams kLosslessNode{1.0, 0.0, 0.0, {3.0, 0.0}, 0.0};
const NodeParams kLossyNode{1.0, 0.05, 0.2, {5.0, 0.0}, 0.0};

PhotonEnvelope a1_envelope() {
    return make_gaussian(0.0, 8.0, TimeGrid::from_span(-80.0, 80.0, 0.01));
}

PhotonEnvelope lossy_envelope() {
    return make_gaussian(0.0, 10.0, TimeGrid::from_span(-100.0, 100.0, 0.005));
}

bool check_le(std::ostream& out, const std::string& label, double value, double bound) {
    const bool ok = value <= bound;
    out << label << " = " << value << (ok ? " <= " : " > ") << bound << "; ";
    return ok;
}

bool check_ge(std::ostream& out, const std::string& label, double value, double bound) {
    const bool ok = value >= bound;
    out << label << " = " << value << (ok ? " >= " : " < ") << bound << "; ";
    return ok;
}

// A1: lossless trapping round trip at fixed grid resolution.
bool a1(std::ostream& out) {
    const PhotonEnvelope env = a1_envelope();
    const SynthesisResult syn = synthesize_trap(env, kLosslessNode);
    const SimOutcome sim = simulate(InputField::from_envelope(env), syn.pulse, kLosslessNode,
                                    Eigen::Vector3cd::Zero());
    note_flux(sim.budgets);
    bool ok = check_ge(out, "final |e|^2", std::norm(sim.e[env.size() - 1]), 1.0 - 1e-6);
    ok &= check_le(out, "emitted", sim.budgets.emitted, 1e-6);
    return ok;
}

// A2: lossy trapping reaches the closed-form efficiency.
bool a2(std::ostream& out) {
    const PhotonEnvelope env = lossy_envelope();
    const double predicted = eta_trap(env, kLossyNode);
    const SynthesisResult syn = synthesize_trap(env, kLossyNode);
    const SimOutcome sim = simulate(InputField::from_envelope(env), syn.pulse, kLossyNode,
                                    Eigen::Vector3cd::Zero());
    note_flux(sim.budgets);
    const double simulated = std::norm(sim.e[env.size() - 1]);
    out << "predicted = " << predicted << ", simulated = " << simulated << "; ";
    bool ok = check_le(out, "|difference|", std::abs(simulated - predicted), 1e-4);
    ok &= check_le(out, "|predicted - 0.948175|", std::abs(predicted - 0.948175), 1e-5);
    return ok;
}

// A3: generation efficiency and emitted waveform.
bool a3(std::ostream& out) {
    const PhotonEnvelope env = lossy_envelope();
    const double predicted = eta_gen(env, kLossyNode);
    const SynthesisResult syn = synthesize_gen(env, kLossyNode);
    const SimOutcome sim =
        simulate(InputField::zero(env.grid), syn.pulse, kLossyNode,
                 Eigen::Vector3cd(Complex(0, 0), Complex(0, 0), Complex(1, 0)));
    note_flux(sim.budgets);
    out << "predicted = " << predicted << ", emitted = " << sim.budgets.emitted << "; ";
    bool ok = check_le(out, "|emitted - predicted|",
                       std::abs(sim.budgets.emitted - predicted), 1e-4);
    ok &= check_le(out, "|predicted - 0.9503671|", std::abs(predicted - 0.9503671), 1e-5);
    ok &= check_ge(out, "overlap", output_overlap(sim.alpha_out, env), 1.0 - 1e-4);
    return ok;
}

// A4: margins are detuning-independent bit for bit; the pulse magnitude is
// asserted detuning-invariant and its phase detuning-dependent; a real
// envelope at zero detuning needs no chirp.
bool a4(std::ostream& out) {
    const PhotonEnvelope env = lossy_envelope();
    bool ok = true;

    const FeasibilityReport base = margin_trap(env, kLossyNode);
    double worst_margin = 0.0;
    for (double delta : {5.0, 50.0}) {
        NodeParams p = kLossyNode;
        p.delta = delta;
        const FeasibilityReport shifted = margin_trap(env, p);
        worst_margin =
            std::max(worst_margin, (shifted.margin - base.margin).cwiseAbs().maxCoeff());
    }
    ok &= check_le(out, "margin series max |diff| over detunings", worst_margin, 0.0);

    const SynthesisResult syn0 = synthesize_trap(env, kLossyNode);
    NodeParams p5 = kLossyNode;
    p5.delta = 5.0;
    const SynthesisResult syn5 = synthesize_trap(env, p5);

    const double mag_diff =
        (syn5.pulse.magnitude - syn0.pulse.magnitude).cwiseAbs().maxCoeff();
    // Equations of motion couple the detuning to the excited amplitude, so
    // the drive must intensify as well as chirp; this sub-check records the
    // measured growth against the asserted bound.
    ok &= check_le(out, "max | |Omega|_d5 - |Omega|_d0 |", mag_diff, 1e-10);

    const double floor = 1e-8 * syn0.pulse.magnitude.maxCoeff();
    double phase_diff = 0.0, phase_var = 0.0;
    double lo = 1e300, hi = -1e300;
    for (Eigen::Index k = 0; k < env.size(); ++k) {
        if (syn0.pulse.magnitude[k] <= floor) continue;
        phase_diff = std::max(phase_diff,
                              std::abs(syn5.pulse.phase[k] - syn0.pulse.phase[k]));
        lo = std::min(lo, syn0.pulse.phase[k]);
        hi = std::max(hi, syn0.pulse.phase[k]);
    }
    phase_var = hi - lo;
    ok &= check_ge(out, "max |Phi_d5 - Phi_d0| on support", phase_diff, 1e-3);
    ok &= check_le(out, "Phi variation at delta 0 (real envelope)", phase_var, 1e-8);
    return ok;
}

// A5: probability flux balances on every simulation the suite runs. Adds a
// detuned chirped single-level closure and a two-level closure to the pool
// audited from A1-A3.
bool a5(std::ostream& out) {
    {
        NodeParams p = kLossyNode;
        p.delta = 2.0;
        const PhotonEnvelope env =
            apply_chirp(make_gaussian(0.0, 10.0, TimeGrid::from_span(-100.0, 100.0, 0.005)),
                        0.3);
        const SynthesisResult syn = synthesize_trap(env, p);
        const SimOutcome sim =
            simulate(InputField::from_envelope(env), syn.pulse, p, Eigen::Vector3cd::Zero());
        note_flux(sim.budgets);
    }
    {
        MultiNodeParams m;
        m.kappa = 1.0;
        m.gamma_c = 0.05;
        m.couplings.resize(2);
        m.couplings << Complex(5.0, 0.0), Complex(1.5, 0.0);
        m.branching.resize(2);
        m.branching << Complex(1.0, 0.0), Complex(0.0, 0.0);
        m.deltas.resize(2);
        m.deltas << 0.0, 40.0;
        m.gammas.resize(2);
        m.gammas << 0.1, 0.1;
        const PhotonEnvelope env =
            make_gaussian(0.0, 10.0, TimeGrid::from_span(-100.0, 100.0, 0.002));
        const MultiSynthesisResult syn = synthesize_trap_n(env, m);
        MultiInit init;
        init.r = Eigen::VectorXcd::Zero(2);
        const MultiSimOutcome sim = simulate_n(InputField::from_envelope(env), syn.pulse, m, init);
        note_flux(sim.budgets);
    }

    double worst = 0.0;
    for (double r : g_flux_residuals) worst = std::max(worst, r);
    out << "scenarios = " << g_flux_residuals.size() << "; ";
    bool ok = g_flux_residuals.size() >= 5;
    if (!ok) out << "(too few simulated scenarios) ";
    ok &= check_le(out, "max flux residual", worst, 1e-6);
    return ok;
}

// A6: spurious cavity decay above the leakage rate defeats trapping for
// every envelope in the test set.
bool a6(std::ostream& out) {
    NodeParams blocked = kLossyNode;
    blocked.gamma_c = 1.5;
    std::vector<PhotonEnvelope> envelopes;
    envelopes.push_back(a1_envelope());
    envelopes.push_back(lossy_envelope());
    envelopes.push_back(make_sech(0.0, 5.0, TimeGrid::from_span(-60.0, 60.0, 0.01)));
    envelopes.push_back(apply_chirp(lossy_envelope(), 0.5));
    bool ok = true;
    int rejected = 0;
    for (const auto& env : envelopes) {
        const FeasibilityReport rep = margin_trap(env, blocked);
        if (rep.feasible) ok = false; else ++rejected;
    }
    out << "rejected " << rejected << "/" << envelopes.size() << " envelopes; ";
    return ok;
}

// A7: the N = 1 multilevel pipeline reproduces the single-level one.
bool a7(std::ostream& out) {
    const PhotonEnvelope env = lossy_envelope();
    NodeParams p = kLossyNode;
    p.delta = 0.7;
    const MultiNodeParams m1 = embed_single_level(p);

    const SynthesisResult single = synthesize_trap(env, p);
    const MultiSynthesisResult multi = synthesize_trap_n(env, m1);
    bool ok = true;
    ok &= check_le(out, "pulse magnitude diff",
                   (multi.pulse.magnitude - single.pulse.magnitude).cwiseAbs().maxCoeff(),
                   1e-6);
    ok &= check_le(out, "pulse phase diff",
                   (multi.pulse.phase - single.pulse.phase).cwiseAbs().maxCoeff(), 1e-6);
    double traj_diff = 0.0;
    for (Eigen::Index k = 0; k < env.size(); ++k) {
        traj_diff = std::max({traj_diff, std::abs(multi.traj.g[k] - single.g_traj[k]),
                              std::abs(multi.traj.R(0, k) - single.r_traj[k]),
                              std::abs(multi.traj.e[k] - single.e_traj[k])});
    }
    ok &= check_le(out, "trajectory diff", traj_diff, 1e-6);
    ok &= check_le(out, "eta_trap diff",
                   std::abs(eta_trap_n(multi.traj, m1) - eta_trap(env, p)), 1e-6);

    const SynthesisResult single_gen = synthesize_gen(env, p);
    const MultiSynthesisResult multi_gen = synthesize_gen_n(env, m1);
    ok &= check_le(out, "gen pulse diff",
                   (multi_gen.pulse.magnitude - single_gen.pulse.magnitude)
                       .cwiseAbs()
                       .maxCoeff(),
                   1e-6);
    ok &= check_le(out, "eta_gen diff", std::abs(eta_gen_n(env, m1) - eta_gen(env, p)), 1e-6);
    return ok;
}

// A8: the slow-pulse relation converges to the exact synthesis, and its dual
// round-trips the envelope, both monotonically in tau.
bool a8(std::ostream& out) {
    const NodeParams strong{1.0, 0.0, 0.0, {10.0, 0.0}, 0.0};
    std::vector<double> deviations, l1_errors;
    // one fixed sampling rate across tau
    for (double tau : {25.0, 50.0, 100.0}) {
        const TimeGrid grid = TimeGrid::from_span(-10.0 * tau, 10.0 * tau, 0.25);
        const PhotonEnvelope env = make_gaussian(0.0, tau, grid);
        const ControlPulse approx = adiabatic_pulse(env, strong);
        const SynthesisResult exact = synthesize_trap(env, strong);
        const Eigen::VectorXd cum = cumulative_norm(env);
        double worst = 0.0;
        for (Eigen::Index k = 0; k < env.size(); ++k) {
            if (cum[k] < 0.01 || cum[k] > 0.99) continue;
            const double exact_sq = std::pow(exact.pulse.magnitude[k], 2);
            worst = std::max(worst,
                             std::abs(std::pow(approx.magnitude[k], 2) - exact_sq) / exact_sq);
        }
        deviations.push_back(worst);

        const AdiabaticInversion inv = envelope_from_adiabatic_pulse(approx, strong);
        const Eigen::VectorXd diff =
            (env.values.cwiseAbs2() - inv.envelope.values.cwiseAbs2()).cwiseAbs();
        l1_errors.push_back(trapezoid(diff, grid.dt));
    }
    out << "deviations = {" << deviations[0] << ", " << deviations[1] << ", " << deviations[2]
        << "}, l1 = {" << l1_errors[0] << ", " << l1_errors[1] << ", " << l1_errors[2]
        << "}; ";
    bool ok = deviations[0] > deviations[1] && deviations[1] > deviations[2];
    if (!ok) out << "pulse deviation not monotone; ";
    const bool l1_ok = l1_errors[0] > l1_errors[1] && l1_errors[1] > l1_errors[2];
    if (!l1_ok) out << "round-trip error not monotone; ";
    return ok && l1_ok;
}

// A9: weak coupling bandwidth threshold: the minimum margin grows with the
// pulse duration and crosses zero exactly once on a log grid.
bool a9(std::ostream& out) {
    const NodeParams weak{1.0, 0.0, 0.0, {0.5, 0.0}, 0.0};
    double previous = 0.0;
    bool monotone = true;
    int crossings = 0;
    double first = 0.0, last = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double tau = 0.1 * std::pow(1000.0, i / 19.0);
        const TimeGrid grid = TimeGrid::from_span(-12.0 * tau, 12.0 * tau, tau / 100.0);
        const FeasibilityReport rep = margin_lossless(make_gaussian(0.0, tau, grid), weak);
        if (i == 0) first = rep.min_margin;
        last = rep.min_margin;
        if (i > 0) {
            if (!(rep.min_margin > previous)) monotone = false;
            if (previous <= 0.0 && rep.min_margin > 0.0) ++crossings;
        }
        previous = rep.min_margin;
    }
    out << "min margin spans [" << first << ", " << last << "], crossings = " << crossings
        << "; ";
    if (!monotone) out << "not monotone; ";
    return monotone && crossings == 1;
}

// A10: dark-state diagnostics and the efficiency cost of a spectator level.
bool a10(std::ostream& out) {
    const PhotonEnvelope env = lossy_envelope();
    MultiNodeParams undamped;
    undamped.kappa = 1.0;
    undamped.gamma_c = 0.05;
    undamped.couplings.resize(2);
    undamped.couplings << Complex(5.0, 0.0), Complex(1.5, 0.0);
    undamped.branching.resize(2);
    undamped.branching << Complex(1.0, 0.0), Complex(0.0, 0.0);
    undamped.deltas.resize(2);
    undamped.deltas << 0.0, 50.0;
    undamped.gammas.resize(2);
    undamped.gammas << 0.1, 0.0;

    const MultiSynthesisResult syn_undamped = synthesize_trap_n(env, undamped);
    bool ok = true;
    if (!syn_undamped.dark_warning) {
        ok = false;
        out << "undamped level not flagged; ";
    } else {
        out << "undamped far level flagged dark; ";
    }

    MultiNodeParams damped = undamped;
    damped.gammas[1] = 0.1;
    const MultiSynthesisResult syn_damped = synthesize_trap_n(env, damped);
    if (syn_damped.dark_warning) {
        ok = false;
        out << "damped level wrongly flagged; ";
    }

    const double eta2 = eta_trap_n(syn_damped.traj, damped);
    const double eta1 = eta_trap(env, kLossyNode);  // level 2 removed
    out << "eta^(2) = " << eta2 << " vs eta^(1) = " << eta1 << "; ";
    ok &= eta2 < eta1;
    return ok;
}

// A11: integrator order on the closed-cavity oscillation and exact
// conservation of the stored excitation under a silent control.
bool a11(std::ostream& out) {
    const NodeParams closed{0.0, 0.0, 0.0, {1.0, 0.0}, 0.0};
    auto run_dt = [&](double dt) {
        const TimeGrid grid = TimeGrid::from_span(0.0, 10.0, dt);
        ControlPulse pulse;
        pulse.grid = grid;
        pulse.magnitude = Eigen::VectorXd::Zero(grid.n_points);
        pulse.phase = Eigen::VectorXd::Zero(grid.n_points);
        return simulate(InputField::zero(grid), pulse, closed,
                        Eigen::Vector3cd(Complex(0.8, 0), Complex(0, 0), Complex(0.6, 0)));
    };
    const SimOutcome coarse = run_dt(0.02);
    const SimOutcome halved = run_dt(0.01);
    const SimOutcome reference = run_dt(0.0025);

    auto err = [&](const SimOutcome& sim, Eigen::Index stride_ref) {
        double worst = 0.0;
        for (Eigen::Index k = 0; k < sim.g.size(); ++k) {
            worst = std::max({worst, std::abs(sim.g[k] - reference.g[k * stride_ref]),
                              std::abs(sim.r[k] - reference.r[k * stride_ref])});
        }
        return worst;
    };
    const double ratio = err(coarse, 8) / err(halved, 4);
    bool ok = check_ge(out, "convergence factor on halving", ratio, 8.0);

    double drift = 0.0;
    for (Eigen::Index k = 0; k < coarse.e.size(); ++k) {
        drift = std::max(drift, std::abs(std::abs(coarse.e[k]) - 0.6));
    }
    ok &= check_le(out, "silent-control |e| drift", drift, 1e-12);
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {"A1", "lossless trapping round trip", a1},
        {"A2", "lossy trapping efficiency", a2},
        {"A3", "generation efficiency and waveform", a3},
        {"A4", "detuning covariance of margins and pulse", a4},
        {"A5", "flux balance on all simulated scenarios", a5},
        {"A6", "overdamped cavity rejection", a6},
        {"A7", "single-level reduction of the multilevel pipeline", a7},
        {"A8", "slow-pulse limit convergence and round trip", a8},
        {"A9", "bandwidth threshold in weak coupling", a9},
        {"A10", "dark-state diagnostics and spectator-level cost", a10},
        {"A11", "integrator order and conservation", a11},
    };

    const std::string filter = argc > 1 ? argv[1] : "";
    // A5 audits the runs of A1-A3, so a filtered A5 run executes those first.
    const bool needs_preruns = filter == "A5";

    int failures = 0;
    int executed = 0;
    for (const auto& criterion : criteria) {
        if (!filter.empty() && criterion.id != filter) {
            if (needs_preruns && (criterion.id == "A1" || criterion.id == "A2" ||
                                  criterion.id == "A3")) {
                std::ostringstream sink;
                criterion.body(sink);
            }
            continue;
        }
        ++executed;
        std::ostringstream details;
        bool ok = false;
        try {
            ok = criterion.body(details);
        } catch (const std::exception& err) {
            details << "exception: " << err.what();
        }
        std::cout << criterion.id << (ok ? " PASS " : " FAIL ") << criterion.title << ": "
                  << details.str() << '\n';
        if (!ok) ++failures;
    }

    if (filter.empty()) {
        std::cout << "RESULT: " << (criteria.size() - failures) << "/" << criteria.size()
                  << " criteria passed\n";
    } else if (executed == 0) {
        std::cerr << "no criterion matches '" << filter << "'\n";
        return 1;
    }
    return failures;
}
