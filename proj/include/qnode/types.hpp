#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qnode {

using Complex = std::complex<double>;

// Shared numerical thresholds.
//
// Margins and control pulses are only meaningful once a minimal fraction of
// the photon has entered the node (trapping) or is still left to emit
// (generation); below these thresholds all terms of the governing
// expressions vanish together and round-off dominates.
inline constexpr double kCumulativeStart = 1e-8;  // cumulative-norm floor for margin enforcement / pulse turn-on
inline constexpr double kPulseCutoff = 1e-8;      // |e|^2 floor below which the generation pulse is switched off
inline constexpr double kPhaseFloor = 1e-30;      // |x|^2 floor for phase-rate extraction
inline constexpr double kEdgeLeak = 1e-10;        // max |alpha|^2 dt tolerated at grid edges
inline constexpr double kNormTol = 1e-8;          // envelope normalization tolerance
inline constexpr double kDarkTolRel = 1e-9;       // relative dark-state tolerance on Im(eigenvalue)

} // namespace qnode
