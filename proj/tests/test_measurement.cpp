#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "dh/dynamics.hpp"
#include "dh/errors.hpp"
#include "dh/measurement.hpp"
#include "dh/ontic.hpp"
#include "dh/oracle.hpp"

using namespace dh;

namespace {

Eigen::MatrixXcd letter_mat(Letter l) { return pauli_letter_matrix(l); }

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

OnticState bell_state() {
    OnticState s = fresh_universe(2);
    s = apply_gate(s, GateOp::h(0));
    return apply_gate(s, GateOp::cnot(0, 1));
}

}  // namespace

TEST_CASE("coefficient tables round-trip through dense reconstruction") {
    Eigen::MatrixXcd op(4, 4);
    op << 0.3, cplx(0, 0.1), 0, 0.05,
          cplx(0, -0.1), 0.2, 0.02, 0,
          0, 0.02, 0.25, cplx(0.01, 0.01),
          0.05, 0, cplx(0.01, -0.01), 0.25;
    const std::vector<double> alpha = decompose_povm(op, 2);
    REQUIRE(alpha.size() == 16);
    const Eigen::MatrixXcd back = reconstruct_povm(alpha, 2);
    CHECK((back - op).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("assignment codes put the region's first qubit in the top digit") {
    // Bell projector (|00>+|11>)(<00|+<11|)/2 = (II + XX - YY + ZZ)/4.
    Eigen::VectorXcd bell(4);
    bell << 1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0);
    const Eigen::MatrixXcd proj = bell * bell.adjoint();
    const std::vector<double> alpha = decompose_povm(proj, 2);
    // code = 4*d0 + d1 with X=1, Y=2, Z=3: XX=5, YY=10, ZZ=15.
    CHECK(alpha[0] == doctest::Approx(0.25));
    CHECK(alpha[5] == doctest::Approx(0.25));
    CHECK(alpha[10] == doctest::Approx(-0.25));
    CHECK(alpha[15] == doctest::Approx(0.25));
    double off = 0;
    for (std::size_t j : {1, 2, 3, 4, 6, 7, 8, 9, 11, 12, 13, 14})
        off = std::max(off, std::abs(alpha[j]));
    CHECK(off < 1e-12);
}

TEST_CASE("binary observable measurements split into half-sum tables") {
    const MeasurementSpec spec = MeasurementSpec::from_observable(Region::of({0}), letter_mat(Letter::Z));
    REQUIRE(spec.outcomes == std::vector<std::string>{"+", "-"});
    CHECK(spec.alpha[0][0] == doctest::Approx(0.5));   // I
    CHECK(spec.alpha[0][3] == doctest::Approx(0.5));   // Z
    CHECK(spec.alpha[1][0] == doctest::Approx(0.5));
    CHECK(spec.alpha[1][3] == doctest::Approx(-0.5));
    CHECK(spec.outcome_index("-") == 1);
    CHECK_THROWS_AS(spec.outcome_index("?"), UsageError);

    // Non-involution observables are rejected: eigenvalues must be +/-1.
    Eigen::MatrixXcd tilted = 0.5 * letter_mat(Letter::Z);
    CHECK_THROWS_AS(MeasurementSpec::from_observable(Region::of({0}), tilted), UsageError);
}

TEST_CASE("POVM validation enforces completeness and positivity") {
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2, 2);
    const Eigen::MatrixXcd z = letter_mat(Letter::Z);
    // Elements that do not sum to identity.
    CHECK_THROWS_AS(MeasurementSpec::from_matrices(Region::of({0}), {"a", "b"},
                                                   {0.5 * (id + z), 0.4 * (id - z)}),
                    UsageError);
    // An element with a negative eigenvalue.
    CHECK_THROWS_AS(
        MeasurementSpec::from_matrices(Region::of({0}), {"a", "b"}, {1.2 * (id + z) / 2.0,
                                                                     id - 1.2 * (id + z) / 2.0}),
        UsageError);
    // Count mismatch between labels and matrices.
    CHECK_THROWS_AS(MeasurementSpec::from_matrices(Region::of({0}), {"a"}, {id / 2.0, id / 2.0}),
                    UsageError);
    // A valid non-projective pair passes.
    const MeasurementSpec soft =
        MeasurementSpec::from_matrices(Region::of({0}), {"a", "b"}, {0.3 * id, 0.7 * id});
    CHECK(measure(soft, fresh_universe(1)).at("a") == doctest::Approx(0.3));
}

TEST_CASE("preset basis measurements reproduce Born statistics on named states") {
    struct Row {
        const char* prep;
        Letter basis;
        double p_plus;
    };
    const Row rows[] = {
        {"z+", Letter::Z, 1.0}, {"z-", Letter::Z, 0.0}, {"x+", Letter::Z, 0.5},
        {"x+", Letter::X, 1.0}, {"x-", Letter::X, 0.0}, {"y+", Letter::Y, 1.0},
        {"y-", Letter::Y, 0.0}, {"z+", Letter::X, 0.5}, {"y+", Letter::Z, 0.5},
    };
    for (const auto& r : rows) {
        CAPTURE(r.prep);
        const OnticState s = prepare_pure(fresh_universe(1), 0, named_state_unitary(r.prep));
        const OutcomeDistribution d = measure(MeasurementSpec::preset(0, r.basis), s);
        CHECK(d.at("+") == doctest::Approx(r.p_plus).epsilon(1e-9));
        CHECK(d.at("+") + d.at("-") == doctest::Approx(1.0));
    }
}

TEST_CASE("indicator substitutes tracked elements, not fresh letters") {
    // After H, measuring Z on qubit 0 must read the rotated element.
    OnticState s = fresh_universe(1);
    s = apply_gate(s, GateOp::h(0));
    const MeasurementSpec z = MeasurementSpec::preset(0, Letter::Z);
    CHECK(indicator(z, 0, s) == doctest::Approx(0.5));
    const MeasurementSpec x = MeasurementSpec::preset(0, Letter::X);
    CHECK(indicator(x, 0, s) == doctest::Approx(1.0));
}

TEST_CASE("joint indicator is an operator product, not an indicator product") {
    const OnticState bell = bell_state();
    const MeasurementSpec z0 = MeasurementSpec::preset(0, Letter::Z);
    const MeasurementSpec z1 = MeasurementSpec::preset(1, Letter::Z);
    // P(+,+) on the Bell state is 1/2 while the indicator product is 1/4.
    CHECK(joint_indicator(z0, 0, z1, 0, bell) == doctest::Approx(0.5));
    CHECK(indicator(z0, 0, bell) * indicator(z1, 0, bell) == doctest::Approx(0.25));
    const OutcomeDistribution joint = joint_distribution(z0, z1, bell);
    CHECK(joint.at("+,+") == doctest::Approx(0.5));
    CHECK(joint.at("+,-") == doctest::Approx(0.0));
    CHECK(joint.at("-,-") == doctest::Approx(0.5));
    // Overlapping regions are rejected.
    CHECK_THROWS_AS(joint_indicator(z0, 0, z0, 0, bell), UsageError);
}

TEST_CASE("indicators outside [0,1] beyond tolerance raise numeric errors") {
    OnticState s = fresh_universe(1);
    QubitDescriptor d = s.descriptor(0);
    d.z_bar *= cplx(3.0, 0.0);  // no longer a valid tracked element
    s.set_descriptor(0, d);
    const MeasurementSpec z = MeasurementSpec::preset(0, Letter::Z);
    CHECK_THROWS_AS(indicator(z, 0, s), NumericError);
}

TEST_CASE("measurement statistics agree with the dense Born rule on random regions") {
    OnticState s = fresh_universe(3);
    for (const auto& g : {GateOp::h(0), GateOp::t(0), GateOp::cnot(0, 2), GateOp::ry(1, 0.9),
                          GateOp::cz(1, 2), GateOp::rz(2, -0.4)})
        s = apply_gate(s, g);
    const std::vector<GateOp> history = {GateOp::h(0),      GateOp::t(0),  GateOp::cnot(0, 2),
                                         GateOp::ry(1, 0.9), GateOp::cz(1, 2), GateOp::rz(2, -0.4)};
    const Eigen::MatrixXcd obs = kron(letter_mat(Letter::X), letter_mat(Letter::Z));
    const MeasurementSpec spec = MeasurementSpec::from_observable(Region::of({0, 2}), obs);
    const OutcomeDistribution d = measure(spec, s);

    Eigen::VectorXcd psi = oracle::reference_state(3);
    psi = oracle::evolve(psi, history);
    oracle::DenseOperator e_plus{reconstruct_povm(spec.alpha[0], 2), {0, 2}};
    oracle::DenseOperator e_minus{reconstruct_povm(spec.alpha[1], 2), {0, 2}};
    const auto born = oracle::born_probabilities(psi, {{"+", e_plus}, {"-", e_minus}});
    CHECK(d.at("+") == doctest::Approx(born.at("+")).epsilon(1e-9));
    CHECK(d.at("-") == doctest::Approx(born.at("-")).epsilon(1e-9));
}

TEST_CASE("mixtures average indicator values by branch weight") {
    const OnticState plus = fresh_universe(1);
    const OnticState flipped = apply_gate(plus, GateOp::x(0));
    const EpistemicState mix({{0.5, plus}, {0.5, flipped}});
    const OutcomeDistribution d = measure(MeasurementSpec::preset(0, Letter::Z), mix);
    CHECK(d.at("+") == doctest::Approx(0.5));
    CHECK(d.at("-") == doctest::Approx(0.5));
}

TEST_CASE("the full pipeline equals measure-after-evolve") {
    const EpistemicState prep = EpistemicState::pure(fresh_universe(2));
    TransformationContext ctx;
    ctx.alternatives = {{0.75, {GateOp::h(0), GateOp::cnot(0, 1)}}, {0.25, {GateOp::x(1)}}};
    const MeasurementSpec spec = MeasurementSpec::preset(1, Letter::Z);
    const OutcomeDistribution piped = probability_pipeline(prep, ctx, spec);
    const EpistemicState evolved = apply_transformation(prep, ctx);
    const OutcomeDistribution direct = measure(spec, evolved);
    for (const auto& [label, p] : piped) CHECK(p == doctest::Approx(direct.at(label)).epsilon(1e-12));
    const double total = piped.at("+") + piped.at("-");
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("conditioning updates branch weights by Bayes rule") {
    // Branches z+ and z- mixed 50/50; observing "+" in Z keeps only z+.
    const OnticState up = fresh_universe(1);
    const OnticState down = apply_gate(up, GateOp::x(0));
    const EpistemicState mix({{0.5, up}, {0.5, down}});
    const MeasurementSpec z = MeasurementSpec::preset(0, Letter::Z);
    const EpistemicState post = condition_on_outcome(mix, z, 0);
    REQUIRE(post.branches().size() == 1);
    CHECK(post.branches()[0].weight == doctest::Approx(1.0));
    CHECK(measure(z, post).at("+") == doctest::Approx(1.0));
    // Conditioning on an impossible outcome is rejected.
    const EpistemicState sure = EpistemicState::pure(up);
    CHECK_THROWS_AS(condition_on_outcome(sure, z, 1), UsageError);
}

TEST_CASE("single-qubit statistics do not depend on padding width") {
    // Z on qubit 0 measured directly, vs embedded in a 3-qubit universe where
    // other qubits were entangled among themselves.
    OnticState wide = fresh_universe(3);
    wide = apply_gate(wide, GateOp::h(0));
    wide = apply_gate(wide, GateOp::h(1));
    wide = apply_gate(wide, GateOp::cnot(1, 2));
    OnticState narrow = fresh_universe(1);
    narrow = apply_gate(narrow, GateOp::h(0));
    const OutcomeDistribution dw = measure(MeasurementSpec::preset(0, Letter::Z), wide);
    const OutcomeDistribution dn = measure(MeasurementSpec::preset(0, Letter::Z), narrow);
    CHECK(dw.at("+") == doctest::Approx(dn.at("+")).epsilon(1e-12));
}

TEST_CASE("observable embedding is outcome-stable across equivalent regions") {
    // Measuring Z on {0} and Z (x) I on {0,1} must give identical statistics.
    const OnticState bell = bell_state();
    const MeasurementSpec narrow = MeasurementSpec::preset(0, Letter::Z);
    const Eigen::MatrixXcd wide_obs =
        kron(letter_mat(Letter::Z), Eigen::MatrixXcd::Identity(2, 2));
    const MeasurementSpec wide = MeasurementSpec::from_observable(Region::of({0, 1}), wide_obs);
    const OutcomeDistribution dn = measure(narrow, bell);
    const OutcomeDistribution dw = measure(wide, bell);
    CHECK(dn.at("+") == doctest::Approx(dw.at("+")).epsilon(1e-12));
    CHECK(dn.at("-") == doctest::Approx(dw.at("-")).epsilon(1e-12));
}

TEST_CASE("build_observable reproduces the padded element on a fresh universe") {
    const MeasurementSpec spec = MeasurementSpec::preset(1, Letter::X);
    const OnticState s = fresh_universe(3);
    const PauliSum o = build_observable(spec, 0, s);
    // (I + X1)/2 padded to three qubits.
    CHECK(o.coefficient(word_from_str("III")) == cplx(0.5, 0.0));
    CHECK(o.coefficient(word_from_str("IXI")) == cplx(0.5, 0.0));
    CHECK(o.term_count() == 2);
}
