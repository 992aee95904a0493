#pragma once

#include <Eigen/Dense>

#include "qnode/envelope.hpp"
#include "qnode/feasibility.hpp"
#include "qnode/node_params.hpp"
#include "qnode/time_grid.hpp"

namespace qnode {

/// Complex control drive Omega(t) = |Omega(t)| e^{i Phi(t)} stored as
/// magnitude >= 0 and unwrapped continuous phase.
struct ControlPulse {
    TimeGrid grid;
    Eigen::VectorXd magnitude;
    Eigen::VectorXd phase;

    Complex value(Eigen::Index k) const {
        return std::polar(magnitude[k], phase[k]);
    }
    Eigen::VectorXcd complex_series() const;
};

/// Builds magnitude/phase from a complex series; samples with zero magnitude
/// inherit the nearest defined phase so the stored phase stays continuous.
ControlPulse pulse_from_complex(const TimeGrid& grid, const Eigen::VectorXcd& omega);

enum class TransferMode { trap, generate };

struct SynthesisResult {
    ControlPulse pulse;
    Eigen::VectorXcd g_traj;
    Eigen::VectorXcd r_traj;
    Eigen::VectorXcd e_traj;
    double efficiency = 0.0;
    TransferMode mode = TransferMode::trap;
};

/// Unique control pulse that absorbs the photon while leaving waveguide and
/// node unentangled.
///
/// Construction: g = alpha/sqrt(kappa), r = i(gdot - (kappa-gamma_c)/2 g)/g0*,
/// |e|^2 equals the trapping margin, the phase of e integrates
///   Phi_e' = (|r|^2 (Phi_r' + delta) - |g|^2 Phi_g') / |e|^2
/// from the first point where the cumulative norm exceeds kCumulativeStart
/// (Phi_e = 0 there), and
///   Omega/2 = (i/e) [rdot + (gamma_sp/2 + i delta) r + i g0 g],
/// with Omega = 0 before that point. The final |e|^2 is the efficiency.
/// Throws Infeasible when the margin criterion fails.
SynthesisResult synthesize_trap(const PhotonEnvelope& env, const NodeParams& p);

/// Control pulse emitting the photon as alpha_out = sqrt(eta_gen) alpha,
/// with g = sqrt(eta_gen/kappa) alpha, r = i(gdot + (kappa+gamma_c)/2 g)/g0*,
/// |e|^2 the generation margin; the pulse is clamped to zero once
/// |e|^2 < kPulseCutoff. efficiency = eta_gen.
SynthesisResult synthesize_gen(const PhotonEnvelope& env, const NodeParams& p);

/// Trapping efficiency
///   (1 - Gc/k)(1 - gamma (k - Gc)/(4|g0|^2)) - gamma/(k |g0|^2) Int |adot|^2.
/// May be <= 0; a non-positive value signals infeasibility to callers.
double eta_trap(const PhotonEnvelope& env, const NodeParams& p);

/// Generation efficiency
///   [ (1 + Gc/k)(1 + gamma (k + Gc)/(4|g0|^2)) + gamma/(k |g0|^2) Int |adot|^2 ]^{-1}.
double eta_gen(const PhotonEnvelope& env, const NodeParams& p);

/// Slow-pulse (STIRAP) limit of the trapping pulse,
///   |Omega(t)/2|^2 = |g0|^2 |alpha(t)|^2 / (kappa Int_{-inf}^t |alpha|^2),
/// zero phase, zero magnitude below the cumulative-norm floor. Requires a
/// real envelope; throws ChirpedInput when |Im alpha| exceeds 1e-10.
ControlPulse adiabatic_pulse(const PhotonEnvelope& env, const NodeParams& p);

struct AdiabaticInversion {
    PhotonEnvelope envelope;
    /// Total |alpha|^2 mass produced by the closed form before
    /// renormalization; 1 in the exact adiabatic limit, 0 for a zero pulse.
    double norm_before_renormalization = 0.0;
};

/// Dual of adiabatic_pulse: recovers the photon envelope a given slow
/// control pulse would emit or absorb,
///   |alpha(t)|^2 = (kappa/|g0|^2) |Omega(t)/2|^2
///                  * exp(-(kappa/|g0|^2) Int_t^{+inf} |Omega(s)/2|^2 ds),
/// renormalized, with the pre-normalization mass reported. The inverse of
/// adiabatic_pulse for any square-integrable magnitude (exact in the
/// adiabatic limit). Requires zero phase.
AdiabaticInversion envelope_from_adiabatic_pulse(const ControlPulse& pulse, const NodeParams& p);

} // namespace qnode
