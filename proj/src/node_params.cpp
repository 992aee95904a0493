#include "qnode/node_params.hpp"

#include <cmath>

namespace qnode {

void validate(const NodeParams& p) {
    if (!(p.kappa >= 0.0)) throw InvalidArgument("NodeParams: kappa must be >= 0");
    if (!(p.gamma_c >= 0.0)) throw InvalidArgument("NodeParams: gamma_c must be >= 0");
    if (!(p.gamma_sp >= 0.0)) throw InvalidArgument("NodeParams: gamma_sp must be >= 0");
    if (!(std::abs(p.g0) > 0.0)) throw InvalidArgument("NodeParams: |g0| must be > 0");
}

void validate(const MultiNodeParams& m) {
    const Eigen::Index n = m.couplings.size();
    if (n < 1) throw InvalidArgument("MultiNodeParams: need at least one level");
    if (m.branching.size() != n || m.deltas.size() != n || m.gammas.size() != n) {
        throw InvalidArgument("MultiNodeParams: per-level arrays must share one length");
    }
    if (!(m.kappa >= 0.0)) throw InvalidArgument("MultiNodeParams: kappa must be >= 0");
    if (!(m.gamma_c >= 0.0)) throw InvalidArgument("MultiNodeParams: gamma_c must be >= 0");
    if ((m.gammas.array() < 0.0).any()) {
        throw InvalidArgument("MultiNodeParams: gammas must be >= 0");
    }
    if (std::abs(m.branching.norm() - 1.0) > 1e-12) {
        throw InvalidArgument("MultiNodeParams: branching vector must have unit norm");
    }
    const double g_par = std::abs(m.branching.dot(m.couplings));  // |V† G|
    if (g_par <= 1e-12 * m.couplings.norm()) {
        throw DegenerateBranching("MultiNodeParams: control branching orthogonal to couplings");
    }
}

double purcell_factor(const NodeParams& p) {
    if (p.gamma_sp == 0.0 || p.kappa == 0.0) {
        throw UndefinedForZeroGamma("purcell_factor: kappa * gamma_sp vanishes");
    }
    return 4.0 * p.g0_sq() / (p.kappa * p.gamma_sp);
}

CouplingRegime coupling_regime(const NodeParams& p) {
    const double splitting = 2.0 * std::abs(p.g0);
    const double linewidth = std::max(p.kappa / 2.0, p.gamma_sp / 2.0);
    return splitting > linewidth ? CouplingRegime::strong : CouplingRegime::weak;
}

std::string to_string(CouplingRegime r) {
    return r == CouplingRegime::strong ? "strong" : "weak";
}

NodeParams as_single_level(const MultiNodeParams& m) {
    if (m.n_levels() != 1) {
        throw NotSingleLevel("as_single_level: node has " + std::to_string(m.n_levels()) +
                             " excited levels");
    }
    NodeParams p;
    p.kappa = m.kappa;
    p.gamma_c = m.gamma_c;
    p.gamma_sp = 2.0 * m.gammas[0];
    p.g0 = m.couplings[0];
    p.delta = m.deltas[0];
    validate(p);
    return p;
}

MultiNodeParams embed_single_level(const NodeParams& p) {
    MultiNodeParams m;
    m.kappa = p.kappa;
    m.gamma_c = p.gamma_c;
    m.couplings = Eigen::VectorXcd::Constant(1, p.g0);
    m.branching = Eigen::VectorXcd::Constant(1, Complex(1.0, 0.0));
    m.deltas = Eigen::VectorXd::Constant(1, p.delta);
    m.gammas = Eigen::VectorXd::Constant(1, p.gamma_sp / 2.0);
    validate(m);
    return m;
}

} // namespace qnode
