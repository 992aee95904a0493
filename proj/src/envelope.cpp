#include "qnode/envelope.hpp"

#include <cmath>
#include <numbers>

#include "qnode/csv.hpp"
#include "qnode/quadrature.hpp"

namespace qnode {

namespace {

// Normalizes in place and enforces the edge-decay invariant: the criteria
// integrate from -infinity, so truncated tail probability must stay below
// kEdgeLeak instead of being silently dropped.
void finalize(PhotonEnvelope& env) {
    const double nrm = trapezoid(env.values.cwiseAbs2().eval(), env.grid.dt);
    if (!(nrm > 0.0)) throw InvalidArgument("PhotonEnvelope: zero norm");
    const double scale = 1.0 / std::sqrt(nrm);
    env.values *= scale;
    env.derivatives *= scale;

    const double leak_lo = std::norm(env.values[0]) * env.grid.dt;
    const double leak_hi = std::norm(env.values[env.size() - 1]) * env.grid.dt;
    if (leak_lo >= kEdgeLeak || leak_hi >= kEdgeLeak) {
        throw GridTooNarrow("PhotonEnvelope: |alpha|^2 dt at grid edges is (" +
                            format_double(leak_lo) + ", " + format_double(leak_hi) +
                            "), must be < " + format_double(kEdgeLeak));
    }
}

PhotonEnvelope build_analytic(EnvelopeFamily family, double t0, double tau,
                              double chirp, const TimeGrid& grid) {
    validate(grid);
    if (!(tau > 0.0)) throw InvalidArgument("PhotonEnvelope: tau must be positive");

    PhotonEnvelope env;
    env.grid = grid;
    env.family = family;
    env.t0 = t0;
    env.tau = tau;
    env.chirp = chirp;
    env.values.resize(grid.n_points);
    env.derivatives.resize(grid.n_points);

    for (Eigen::Index k = 0; k < grid.n_points; ++k) {
        const double t = grid.t(k) - t0;
        double base = 0.0;
        double log_deriv = 0.0;  // d(ln base)/dt, finite everywhere for both families
        if (family == EnvelopeFamily::gaussian) {
            base = std::pow(2.0 * std::numbers::pi * tau * tau, -0.25) *
                   std::exp(-t * t / (4.0 * tau * tau));
            log_deriv = -t / (2.0 * tau * tau);
        } else {
            base = 1.0 / (std::sqrt(2.0 * tau) * std::cosh(t / tau));
            log_deriv = -std::tanh(t / tau) / tau;
        }
        const Complex value = base * std::polar(1.0, -chirp * t);
        env.values[k] = value;
        env.derivatives[k] = Complex(log_deriv, -chirp) * value;
    }
    finalize(env);
    return env;
}

} // namespace

PhotonEnvelope make_gaussian(double t0, double tau, const TimeGrid& grid) {
    return build_analytic(EnvelopeFamily::gaussian, t0, tau, 0.0, grid);
}

PhotonEnvelope make_sech(double t0, double tau, const TimeGrid& grid) {
    return build_analytic(EnvelopeFamily::sech, t0, tau, 0.0, grid);
}

PhotonEnvelope make_tabulated(const TimeGrid& grid, Eigen::VectorXcd values) {
    validate(grid);
    if (values.size() != grid.n_points) {
        throw InvalidArgument("make_tabulated: sample count does not match grid");
    }
    PhotonEnvelope env;
    env.grid = grid;
    env.family = EnvelopeFamily::tabulated;
    env.values = std::move(values);
    env.derivatives = finite_difference_4(env.values, grid.dt);
    finalize(env);
    return env;
}

PhotonEnvelope apply_chirp(const PhotonEnvelope& env, double delta_pc) {
    if (env.family != EnvelopeFamily::tabulated) {
        return build_analytic(env.family, env.t0, env.tau, env.chirp + delta_pc, env.grid);
    }
    PhotonEnvelope out = env;
    out.chirp += delta_pc;
    for (Eigen::Index k = 0; k < env.size(); ++k) {
        out.values[k] *= std::polar(1.0, -delta_pc * (env.grid.t(k) - env.grid.t_start));
    }
    out.derivatives = finite_difference_4(out.values, env.grid.dt);
    return out;
}

std::pair<Complex, Complex> sample(const PhotonEnvelope& env, Eigen::Index k) {
    if (k < 0 || k >= env.size()) {
        throw IndexOutOfRange("sample: index " + std::to_string(k) + " outside grid of " +
                              std::to_string(env.size()) + " points");
    }
    return {env.values[k], env.derivatives[k]};
}

Eigen::VectorXd cumulative_norm(const PhotonEnvelope& env) {
    return cumulative_trapezoid(env.values.cwiseAbs2().eval(), env.grid.dt);
}

double total_norm(const PhotonEnvelope& env) {
    return trapezoid(env.values.cwiseAbs2().eval(), env.grid.dt);
}

PhotonEnvelope load_envelope_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    if (table.header.size() != 3 || table.header[0] != "t" || table.header[1] != "re" ||
        table.header[2] != "im") {
        throw ParseError("envelope csv '" + path + "': header must be exactly t,re,im");
    }
    const Eigen::VectorXd& t = table.columns[0];
    const Eigen::Index n = t.size();
    if (n < 2) throw ParseError("envelope csv '" + path + "': need at least 2 rows");

    const double dt = (t[n - 1] - t[0]) / static_cast<double>(n - 1);
    if (!(dt > 0.0)) throw ParseError("envelope csv '" + path + "': time column must increase");
    for (Eigen::Index k = 0; k < n; ++k) {
        const double expected = t[0] + static_cast<double>(k) * dt;
        if (std::abs(t[k] - expected) > 1e-9 * dt) {
            throw ParseError("envelope csv '" + path + "': non-uniform time column at row " +
                             std::to_string(k));
        }
    }

    Eigen::VectorXcd values(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        values[k] = Complex(table.columns[1][k], table.columns[2][k]);
    }
    return make_tabulated(TimeGrid{t[0], dt, n}, std::move(values));
}

} // namespace qnode
