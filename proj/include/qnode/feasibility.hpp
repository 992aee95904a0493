#pragma once

#include <optional>

#include <Eigen/Dense>

#include "qnode/envelope.hpp"
#include "qnode/node_params.hpp"

namespace qnode {

/// Pointwise existence margin for the disentangling control pulse.
///
/// The margin series is the left-hand side of the existence criterion on the
/// full grid. It is enforced only on interior points where the cumulative
/// norm exceeds kCumulativeStart (both tails for generation, whose margin
/// tends to 0 at late times by construction); [window_lo, window_hi] is that
/// region. min_margin and argmin_t refer to the enforced region. Infeasible
/// inputs still yield the full series for diagnosis.
struct FeasibilityReport {
    Eigen::VectorXd margin;
    double min_margin = 0.0;
    double argmin_t = 0.0;
    bool feasible = false;
    std::optional<double> predicted_efficiency;
    Eigen::Index window_lo = 0;
    Eigen::Index window_hi = -1;  // inclusive; lo > hi means empty
};

/// Lossless criterion
///   margin(t) = Int_{-inf}^t |a|^2 - |a|^2/kappa - |adot - (kappa/2) a|^2 / (kappa |g0|^2).
/// gamma_sp, gamma_c and delta of p are ignored. predicted_efficiency is 1
/// when feasible.
FeasibilityReport margin_lossless(const PhotonEnvelope& env, const NodeParams& p);

/// Lossy trapping margin; the series equals |e(t)|^2 of the trapping
/// construction, its final value the trapping efficiency. Unconditionally
/// infeasible for gamma_c >= kappa.
FeasibilityReport margin_trap(const PhotonEnvelope& env, const NodeParams& p);

/// Lossy generation margin; the series equals |e(t)|^2 = 1 - eta_gen * F(t)
/// with F the accumulated emission functional. predicted_efficiency is
/// always eta_gen.
FeasibilityReport margin_gen(const PhotonEnvelope& env, const NodeParams& p);

} // namespace qnode
