#pragma once

#include <string>

#include <Eigen/Dense>

#include "qnode/errors.hpp"
#include "qnode/types.hpp"

namespace qnode {

/// Physical rates of a node with a single excited level.
///
/// kappa    cavity -> waveguide leakage rate
/// gamma_c  spurious cavity loss rate
/// gamma_sp spontaneous emission rate from the excited level
/// g0       vacuum Rabi frequency (complex; only |g0|^2 enters scalar formulas)
/// delta    common Raman detuning
struct NodeParams {
    double kappa = 1.0;
    double gamma_c = 0.0;
    double gamma_sp = 0.0;
    Complex g0{1.0, 0.0};
    double delta = 0.0;

    double g0_sq() const { return std::norm(g0); }
};

/// kappa >= 0 (0 only for closed-cavity diagnostics), gamma_c, gamma_sp >= 0,
/// |g0| > 0. Throws InvalidArgument.
void validate(const NodeParams& p);

/// Node with N excited levels. G holds the cavity couplings g_k, V the unit
/// branching vector of the control drive, deltas/gammas the per-level Raman
/// detunings and amplitude decay rates (the complex detuning matrix is
/// diag(delta_k - i gamma_k)).
struct MultiNodeParams {
    double kappa = 1.0;
    double gamma_c = 0.0;
    Eigen::VectorXcd couplings;   // G, length N
    Eigen::VectorXcd branching;   // V, length N, unit norm
    Eigen::VectorXd deltas;       // length N
    Eigen::VectorXd gammas;       // length N

    Eigen::Index n_levels() const { return couplings.size(); }
};

/// Lengths equal and >= 1, ||V|| = 1 within 1e-12, V†G != 0. Throws
/// InvalidArgument / DegenerateBranching.
void validate(const MultiNodeParams& m);

/// 4 |g0|^2 / (kappa gamma_sp). Throws UndefinedForZeroGamma when
/// gamma_sp = 0 (or kappa = 0).
double purcell_factor(const NodeParams& p);

enum class CouplingRegime { strong, weak };

/// strong iff the vacuum Rabi splitting 2|g0| exceeds both half linewidths.
CouplingRegime coupling_regime(const NodeParams& p);

std::string to_string(CouplingRegime r);

/// N = 1 reduction. The multilevel gamma_k is an amplitude decay rate while
/// gamma_sp decays the population, hence gamma_sp = 2 gamma_1.
/// Throws NotSingleLevel for N > 1.
NodeParams as_single_level(const MultiNodeParams& m);

/// Inverse of as_single_level: embeds a single-level node as N = 1 with
/// gamma_1 = gamma_sp / 2 and V = (1).
MultiNodeParams embed_single_level(const NodeParams& p);

} // namespace qnode
