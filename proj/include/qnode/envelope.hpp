#pragma once

#include <string>
#include <utility>

#include <Eigen/Dense>

#include "qnode/time_grid.hpp"
#include "qnode/types.hpp"

namespace qnode {

enum class EnvelopeFamily { gaussian, sech, tabulated };

/// Normalized complex photon envelope alpha(t) on a uniform grid,
/// units of time^{-1/2}, with integral |alpha|^2 dt = 1.
///
/// Envelopes are immutable after construction and safe to share across
/// threads. For the analytic families the stored derivative series is exact;
/// tabulated envelopes fall back to finite differences.
struct PhotonEnvelope {
    TimeGrid grid;
    Eigen::VectorXcd values;
    Eigen::VectorXcd derivatives;
    EnvelopeFamily family = EnvelopeFamily::tabulated;
    double t0 = 0.0;
    double tau = 0.0;
    double chirp = 0.0;

    Eigen::Index size() const { return grid.n_points; }
};

/// alpha(t) = (2 pi tau^2)^{-1/4} exp(-(t-t0)^2 / (4 tau^2)), renormalized on
/// the grid. Throws GridTooNarrow when the envelope does not vanish at the
/// grid edges (|alpha|^2 dt < kEdgeLeak); callers should span at least
/// [t0 - 8 tau, t0 + 8 tau].
PhotonEnvelope make_gaussian(double t0, double tau, const TimeGrid& grid);

/// alpha(t) = (2 tau)^{-1/2} sech((t-t0)/tau), renormalized; span at least 20 tau.
PhotonEnvelope make_sech(double t0, double tau, const TimeGrid& grid);

/// Arbitrary samples; renormalized, derivatives by finite differences.
PhotonEnvelope make_tabulated(const TimeGrid& grid, Eigen::VectorXcd values);

/// Multiplies by exp(-i delta_pc (t - t_ref)); moduli and norm are unchanged.
/// t_ref is the family center t0 (grid start for tabulated envelopes) so the
/// added phase is only a frequency offset, never an observable amplitude.
PhotonEnvelope apply_chirp(const PhotonEnvelope& env, double delta_pc);

/// (alpha, alpha_dot) at grid index k. Throws IndexOutOfRange.
std::pair<Complex, Complex> sample(const PhotonEnvelope& env, Eigen::Index k);

/// Running integral of |alpha|^2; starts at 0, ends at the total norm.
Eigen::VectorXd cumulative_norm(const PhotonEnvelope& env);

double total_norm(const PhotonEnvelope& env);

/// Reads a `t,re,im` CSV with a strictly uniform time column
/// (tolerance 1e-9 * dt) and builds a tabulated envelope.
PhotonEnvelope load_envelope_csv(const std::string& path);

} // namespace qnode
