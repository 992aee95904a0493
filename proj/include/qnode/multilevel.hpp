#pragma once

#include <vector>

#include <Eigen/Dense>

#include "qnode/envelope.hpp"
#include "qnode/feasibility.hpp"
#include "qnode/node_params.hpp"
#include "qnode/synthesis.hpp"

namespace qnode {

/// Split of the excited-level space into span{V} and its orthogonal
/// complement, with the complex detuning matrix D = diag(delta_k - i gamma_k)
/// expressed in blocks. The complement basis W is built by deterministic
/// Gram-Schmidt seeded from the canonical axes, largest |V_i| first.
///
/// m = D_perp_perp - D_par_perp G_perp^dagger / conj(G_par) generates the
/// closed dynamics of the components the control cannot reach.
struct LevelDecomposition {
    Eigen::VectorXcd v;                    // N
    Eigen::MatrixXcd w;                    // N x (N-1), orthonormal columns
    Complex g_par{};                       // V† G
    Eigen::VectorXcd g_perp;               // W† G
    Complex delta_par_par{};               // V† D V
    Eigen::RowVectorXcd delta_perp_par;    // V† D W
    Eigen::VectorXcd delta_par_perp;       // W† D V
    Eigen::MatrixXcd delta_perp_perp;      // W† D W
    Eigen::MatrixXcd m;                    // (N-1) x (N-1)
};

/// Throws DegenerateBranching when |V†G| < 1e-12 ||G||.
LevelDecomposition decompose(const MultiNodeParams& m);

struct DarkStateReport {
    Eigen::VectorXcd eigenvalues;          // of the matrix m
    std::vector<Eigen::Index> flagged;     // |Im lambda| < tol_dark
    bool any_flagged() const { return !flagged.empty(); }
};

/// Eigenvalues of m with near-real ones flagged. tol_dark <= 0 selects the
/// default kDarkTolRel * max(1, spectral radius). Empty report for N = 1.
DarkStateReport dark_state_check(const LevelDecomposition& d, double tol_dark = -1.0);

struct MultiTrajectory {
    TimeGrid grid;
    Eigen::VectorXcd g;
    Eigen::VectorXcd y;        // gdot -/+ (kappa -/+ gamma_c)/2 g (trap/gen)
    Eigen::VectorXcd r_par;    // component along V
    Eigen::MatrixXcd r_perp;   // (N-1) x n, complement components
    Eigen::MatrixXcd R;        // N x n, reassembled excited amplitudes
    Eigen::VectorXcd e;
};

struct MultiSynthesisResult {
    ControlPulse pulse;
    MultiTrajectory traj;
    Eigen::VectorXd margin;    // |e(t)|^2 series
    double efficiency = 0.0;
    TransferMode mode = TransferMode::trap;
    DarkStateReport dark;
    bool dark_warning = false;
};

/// |e(t)|^2 margins of the N-level constructions (same enforcement window
/// policy as the single-level module).
FeasibilityReport margin_trap_n(const PhotonEnvelope& env, const MultiNodeParams& m);
FeasibilityReport margin_gen_n(const PhotonEnvelope& env, const MultiNodeParams& m);

/// N-level trapping construction. R_perp solves
///   R_perp' = -i m R_perp - i (G_perp g + i D_par_perp y / conj(G_par)),
/// R_par = i (y + i G_perp† R_perp) / conj(G_par), and the pulse is
///   Omega/2 = (i/e) (R_par' + i D_par_par R_par + i D_perp_par R_perp + i g G_par).
/// A DarkStateWarning flag (not an error) is set when m has a near-real
/// eigenvalue. Throws Infeasible when |e|^2 is not positive on the
/// enforcement window.
MultiSynthesisResult synthesize_trap_n(const PhotonEnvelope& env, const MultiNodeParams& m);

/// N-level generation construction (y = gdot + (kappa+gamma_c)/2 g,
/// g = sqrt(eta/kappa) alpha with eta from eta_gen_n).
MultiSynthesisResult synthesize_gen_n(const PhotonEnvelope& env, const MultiNodeParams& m);

/// eta_trap^(N) = 1 - gamma_c/kappa + 2 Int R† Im(D) R evaluated on a
/// trapping trajectory; the loss integral is always <= 0.
double eta_trap_n(const MultiTrajectory& traj, const MultiNodeParams& m);

/// Self-consistent eta_gen^(N). The excited amplitudes scale as sqrt(eta),
/// so the loss integral is linear in eta and one pass at eta = 1 resolves
/// the fixed point:
///   eta = [1 + gamma_c/kappa + L1]^{-1},  L1 = 2 sum_k gamma_k Int |R_k|^2 at eta = 1.
/// Throws NoRootInUnitInterval if the denominator is not a finite value >= 1.
double eta_gen_n(const PhotonEnvelope& env, const MultiNodeParams& m);

} // namespace qnode
