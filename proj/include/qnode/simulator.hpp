#pragma once

#include <Eigen/Dense>

#include "qnode/envelope.hpp"
#include "qnode/multilevel.hpp"
#include "qnode/node_params.hpp"
#include "qnode/synthesis.hpp"

namespace qnode {

/// Input field on the shared grid (raw complex series; a normalized envelope
/// is one way to make one).
struct InputField {
    TimeGrid grid;
    Eigen::VectorXcd series;

    static InputField zero(const TimeGrid& grid);
    static InputField from_envelope(const PhotonEnvelope& env);
    static InputField from_series(const TimeGrid& grid, Eigen::VectorXcd series);
};

/// Probability bookkeeping of one run. The flux identity of the
/// input-output dynamics,
///   d||psi||^2/dt + |a_out|^2 + gamma_c |g|^2 + gamma_sp |r|^2 = |a_in|^2,
/// integrates to node_prob + emitted + spurious_cavity + spontaneous =
/// input + initial.
struct Budgets {
    double input = 0.0;            // Int |a_in|^2
    double emitted = 0.0;          // Int |a_out|^2
    double spurious_cavity = 0.0;  // gamma_c Int |g|^2
    double spontaneous = 0.0;      // gamma_sp Int |r|^2  (2 sum_k gamma_k Int |R_k|^2 for N levels)
    double node_prob = 0.0;        // final ||psi||^2
    double initial = 0.0;          // initial ||psi||^2

    double flux_residual() const {
        return std::abs(node_prob + emitted + spurious_cavity + spontaneous - input - initial);
    }
};

struct SimOutcome {
    TimeGrid grid;
    Eigen::VectorXcd g, r, e;
    Eigen::VectorXcd alpha_out;
    Eigen::VectorXd node_prob;     // ||psi(t)||^2
    Budgets budgets;
};

struct MultiSimOutcome {
    TimeGrid grid;
    Eigen::VectorXcd g, e;
    Eigen::MatrixXcd R;            // N x n
    Eigen::VectorXcd alpha_out;
    Eigen::VectorXd node_prob;
    Budgets budgets;
};

/// Fixed-step classic Runge-Kutta integration of
///   gdot = -i g0* r - (kappa+gamma_c)/2 g + sqrt(kappa) a_in
///   rdot = -(gamma_sp/2 + i delta) r - i g0 g - i (Omega/2) e
///   edot = -i (Omega*/2) r
/// with a_in and Omega linearly interpolated at half steps and
/// a_out = sqrt(kappa) g - a_in recorded at grid points.
///
/// Throws GridMismatch when input/pulse grids differ, StepTooCoarse when
/// dt * max(|Omega|, |g0|, kappa, gamma_c, gamma_sp, |delta|) > 0.1, and
/// InvalidArgument when ||init|| > 1.
SimOutcome simulate(const InputField& input, const ControlPulse& pulse,
                    const NodeParams& p, const Eigen::Vector3cd& init);

struct MultiInit {
    Complex g{0.0, 0.0};
    Eigen::VectorXcd r;  // length N (zero when empty)
    Complex e{0.0, 0.0};
};

/// N-level dynamics on the state (g, R, e):
///   gdot = -i G† R - (kappa+gamma_c)/2 g + sqrt(kappa) a_in
///   Rdot = -i D R - i g G - i (Omega/2) e V
///   edot = -i (Omega*/2) V† R.
MultiSimOutcome simulate_n(const InputField& input, const ControlPulse& pulse,
                           const MultiNodeParams& m, const MultiInit& init);

/// |Int a* b dt|^2 / (Int |a|^2 Int |b|^2), in [0, 1]. Throws ZeroField when
/// Int |a|^2 vanishes and GridMismatch on length mismatch.
double output_overlap(const Eigen::VectorXcd& a, const PhotonEnvelope& b);

} // namespace qnode
