#include <doctest.h>

#include "qnode/node_params.hpp"

using namespace qnode;

TEST_CASE("purcell factor") {
    CHECK(purcell_factor({1.0, 0.0, 0.2, {5.0, 0.0}, 0.0}) == doctest::Approx(500.0));
    CHECK(purcell_factor({1.0, 0.0, 1.0, {0.5, 0.0}, 0.0}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(purcell_factor({1.0, 0.0, 0.0, {5.0, 0.0}, 0.0}), UndefinedForZeroGamma);
}

TEST_CASE("purcell factor scales exactly with |g0|^2") {
    const NodeParams base{2.0, 0.0, 0.3, {1.5, 2.0}, 0.0};
    NodeParams doubled = base;
    doubled.g0 *= 2.0;
    CHECK(purcell_factor(doubled) == 4.0 * purcell_factor(base));
}

TEST_CASE("coupling regime classification") {
    CHECK(coupling_regime({1.0, 0.0, 0.2, {5.0, 0.0}, 0.0}) == CouplingRegime::strong);
    CHECK(coupling_regime({10.0, 0.0, 0.1, {0.5, 0.0}, 0.0}) == CouplingRegime::weak);
    CHECK(coupling_regime({0.1, 0.0, 10.0, {0.5, 0.0}, 0.0}) == CouplingRegime::weak);
}

TEST_CASE("single-level reduction carries the amplitude/population decay factor") {
    MultiNodeParams m;
    m.kappa = 1.0;
    m.gamma_c = 0.05;
    m.couplings = Eigen::VectorXcd::Constant(1, Complex(5.0, 0.0));
    m.branching = Eigen::VectorXcd::Constant(1, Complex(1.0, 0.0));
    m.deltas = Eigen::VectorXd::Constant(1, 3.0);
    m.gammas = Eigen::VectorXd::Constant(1, 0.1);

    const NodeParams p = as_single_level(m);
    CHECK(p.gamma_sp == doctest::Approx(0.2));
    CHECK(p.delta == doctest::Approx(3.0));
    CHECK(p.kappa == doctest::Approx(1.0));
    CHECK(p.gamma_c == doctest::Approx(0.05));
    CHECK(p.g0 == Complex(5.0, 0.0));
}

TEST_CASE("reduction of an embedding is the identity") {
    const NodeParams p{1.0, 0.05, 0.2, {5.0, 1.0}, 2.5};
    const NodeParams back = as_single_level(embed_single_level(p));
    CHECK(back.kappa == p.kappa);
    CHECK(back.gamma_c == p.gamma_c);
    CHECK(back.gamma_sp == doctest::Approx(p.gamma_sp));
    CHECK(back.g0 == p.g0);
    CHECK(back.delta == p.delta);
}

TEST_CASE("as_single_level rejects N > 1") {
    MultiNodeParams m;
    m.couplings = Eigen::VectorXcd::Constant(2, Complex(1.0, 0.0));
    m.branching = Eigen::VectorXcd::Zero(2);
    m.branching[0] = 1.0;
    m.deltas = Eigen::VectorXd::Zero(2);
    m.gammas = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(as_single_level(m), NotSingleLevel);
}

TEST_CASE("multilevel validation") {
    MultiNodeParams m;
    m.couplings = Eigen::VectorXcd::Constant(2, Complex(1.0, 0.0));
    m.branching = Eigen::VectorXcd::Constant(2, Complex(1.0, 0.0));  // norm sqrt(2)
    m.deltas = Eigen::VectorXd::Zero(2);
    m.gammas = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(validate(m), InvalidArgument);

    m.branching << Complex(0.0, 0.0), Complex(1.0, 0.0);
    m.couplings << Complex(1.0, 0.0), Complex(0.0, 0.0);  // V orthogonal to G
    CHECK_THROWS_AS(validate(m), DegenerateBranching);
}
