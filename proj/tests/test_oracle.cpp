#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "dh/errors.hpp"
#include "dh/oracle.hpp"
#include "dh/pauli.hpp"

using namespace dh;

namespace {

PauliSum parse_sum(std::size_t n, std::initializer_list<std::pair<const char*, cplx>> terms) {
    PauliSum p = PauliSum::zero(n);
    for (const auto& [letters, c] : terms) p.add(word_from_str(letters), c);
    return p;
}

}  // namespace

TEST_CASE("reference state is the all-zeros basis vector") {
    const oracle::StateVector v = oracle::reference_state(3);
    REQUIRE(v.size() == 8);
    CHECK(std::abs(v(0) - cplx(1, 0)) < 1e-15);
    CHECK(v.tail(7).norm() < 1e-15);
}

TEST_CASE("basis index convention: qubit q is bit q") {
    // X on qubit 0 of two qubits moves the amplitude to index 1 (bit 0 set).
    oracle::StateVector v = oracle::reference_state(2);
    v = oracle::evolve(v, std::vector<GateOp>{GateOp::x(0)});
    CHECK(std::abs(v(1) - cplx(1, 0)) < 1e-12);
    // CNOT(0,1) then sets bit 1: amplitude at index 3.
    v = oracle::evolve(v, std::vector<GateOp>{GateOp::cnot(0, 1)});
    CHECK(std::abs(v(3) - cplx(1, 0)) < 1e-12);
}

TEST_CASE("evolve produces the Bell amplitudes") {
    const std::vector<GateOp> circuit = {GateOp::h(0), GateOp::cnot(0, 1)};
    const oracle::StateVector v = oracle::evolve(oracle::reference_state(2), circuit);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(v(0) - cplx(r, 0)) < 1e-12);
    CHECK(std::abs(v(3) - cplx(r, 0)) < 1e-12);
    CHECK(std::abs(v(1)) < 1e-12);
    CHECK(std::abs(v(2)) < 1e-12);
}

TEST_CASE("expectation evaluates Pauli sums against amplitudes") {
    const std::vector<GateOp> circuit = {GateOp::h(0), GateOp::cnot(0, 1)};
    const oracle::StateVector bell = oracle::evolve(oracle::reference_state(2), circuit);
    CHECK(oracle::expectation(bell, parse_sum(2, {{"XX", 1.0}})) == doctest::Approx(1.0));
    CHECK(oracle::expectation(bell, parse_sum(2, {{"ZZ", 1.0}})) == doctest::Approx(1.0));
    CHECK(oracle::expectation(bell, parse_sum(2, {{"YY", 1.0}})) == doctest::Approx(-1.0));
    CHECK(oracle::expectation(bell, parse_sum(2, {{"ZI", 1.0}})) == doctest::Approx(0.0));
    CHECK(oracle::expectation(bell, parse_sum(2, {{"II", 0.5}, {"ZZ", 0.5}})) ==
          doctest::Approx(1.0));
}

TEST_CASE("to_matrix/from_matrix round-trips preserve qubit order") {
    // Regression: XI and IX must map to distinct matrices and back.
    const PauliSum xi = parse_sum(2, {{"XI", 1.0}});
    const PauliSum ix = parse_sum(2, {{"IX", 1.0}});
    CHECK(max_coeff_delta(oracle::from_matrix(oracle::to_matrix(xi), 2), xi) < 1e-12);
    CHECK(max_coeff_delta(oracle::from_matrix(oracle::to_matrix(ix), 2), ix) < 1e-12);
    CHECK((oracle::to_matrix(xi) - oracle::to_matrix(ix)).cwiseAbs().maxCoeff() > 0.5);

    const PauliSum mixed =
        parse_sum(3, {{"XYZ", cplx(0.5, 0)}, {"IZI", cplx(-0.25, 0)}, {"YIX", cplx(0, 0.125)}});
    CHECK(max_coeff_delta(oracle::from_matrix(oracle::to_matrix(mixed), 3), mixed) < 1e-12);
}

TEST_CASE("to_matrix places qubit 0 on the low index bit") {
    // Z0 on two qubits: diagonal (+1, -1, +1, -1) since bit 0 alternates.
    const Eigen::MatrixXcd m = oracle::to_matrix(parse_sum(2, {{"ZI", 1.0}}));
    CHECK(std::abs(m(0, 0) - cplx(1, 0)) < 1e-14);
    CHECK(std::abs(m(1, 1) - cplx(-1, 0)) < 1e-14);
    CHECK(std::abs(m(2, 2) - cplx(1, 0)) < 1e-14);
    CHECK(std::abs(m(3, 3) - cplx(-1, 0)) < 1e-14);
}

TEST_CASE("dense conjugation reproduces Heisenberg images") {
    const PauliSum x0 = PauliSum::single(2, 0, Letter::X);
    const PauliSum z0 = PauliSum::single(2, 0, Letter::Z);
    // H: X -> Z.
    PauliSum img = oracle::conjugate_dense(x0, std::vector<GateOp>{GateOp::h(0)});
    CHECK(max_coeff_delta(img, parse_sum(2, {{"ZI", 1.0}})) < 1e-12);
    // CNOT: X0 -> X0 X1, Z1 -> Z0 Z1.
    img = oracle::conjugate_dense(x0, std::vector<GateOp>{GateOp::cnot(0, 1)});
    CHECK(max_coeff_delta(img, parse_sum(2, {{"XX", 1.0}})) < 1e-12);
    img = oracle::conjugate_dense(PauliSum::single(2, 1, Letter::Z),
                                  std::vector<GateOp>{GateOp::cnot(0, 1)});
    CHECK(max_coeff_delta(img, parse_sum(2, {{"ZZ", 1.0}})) < 1e-12);
    // Chronological order: H then CNOT maps X0 to Z0 X1 (not X0 X1).
    img = oracle::conjugate_dense(x0, std::vector<GateOp>{GateOp::h(0), GateOp::cnot(0, 1)});
    CHECK(max_coeff_delta(img, parse_sum(2, {{"ZX", 1.0}})) < 1e-12);
    // Rotations: Rz(t) maps X to cos(t) X - sin(t) Y.
    const double t = 0.32;
    img = oracle::conjugate_dense(PauliSum::single(1, 0, Letter::X),
                                  std::vector<GateOp>{GateOp::rz(0, t)});
    CHECK(max_coeff_delta(img, parse_sum(1, {{"X", std::cos(t)}, {"Y", -std::sin(t)}})) < 1e-12);
    // Sanity: Z commutes through Rz.
    img = oracle::conjugate_dense(z0, std::vector<GateOp>{GateOp::rz(0, 0.77)});
    CHECK(max_coeff_delta(img, parse_sum(2, {{"ZI", 1.0}})) < 1e-12);
}

TEST_CASE("born probabilities validate completeness and report labeled values") {
    const std::vector<GateOp> circuit = {GateOp::h(0), GateOp::cnot(0, 1)};
    const oracle::StateVector bell = oracle::evolve(oracle::reference_state(2), circuit);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2, 2);
    Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(2, 2);
    z(0, 0) = 1;
    z(1, 1) = -1;
    const Eigen::MatrixXcd p_up = (id + z) / 2.0;
    const Eigen::MatrixXcd p_dn = (id - z) / 2.0;
    const auto probs = oracle::born_probabilities(
        bell, {{"up", {p_up, {1}}}, {"down", {p_dn, {1}}}});
    CHECK(probs.at("up") == doctest::Approx(0.5));
    CHECK(probs.at("down") == doctest::Approx(0.5));
    // Incomplete families are rejected.
    CHECK_THROWS_AS(oracle::born_probabilities(bell, {{"up", {p_up, {1}}},
                                                      {"also-up", {p_up, {1}}}}),
                    UsageError);
}

TEST_CASE("multi-target dense operators follow the slot convention") {
    // |11><11| on targets {0,1}: with slot 0 most significant, index 3 of the
    // local matrix. The Bell state gives probability 1/2.
    const std::vector<GateOp> circuit = {GateOp::h(0), GateOp::cnot(0, 1)};
    const oracle::StateVector bell = oracle::evolve(oracle::reference_state(2), circuit);
    Eigen::MatrixXcd p11 = Eigen::MatrixXcd::Zero(4, 4);
    p11(3, 3) = 1;
    const Eigen::MatrixXcd rest = Eigen::MatrixXcd::Identity(4, 4) - p11;
    const auto probs =
        oracle::born_probabilities(bell, {{"both", {p11, {0, 1}}}, {"rest", {rest, {0, 1}}}});
    CHECK(probs.at("both") == doctest::Approx(0.5));
}

TEST_CASE("gate application rejects out-of-range targets") {
    oracle::StateVector v = oracle::reference_state(2);
    CHECK_THROWS_AS(oracle::evolve(v, std::vector<GateOp>{GateOp::h(5)}), UsageError);
}

TEST_CASE("the dense limit guards state construction") {
    CHECK(oracle::dense_limit() >= 1);
    CHECK_THROWS_AS(oracle::reference_state(oracle::dense_limit() + 1), UsageError);
}
